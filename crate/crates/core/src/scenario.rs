//! Reproducible multi-group multicast layouts and their text file format.
//!
//! Group centers are drawn uniformly in an axis-aligned box, one at a time,
//! rejecting draws whose distance to an already placed center falls outside
//! the configured interval. Users are spread uniformly over a horizontal disk
//! around their center.
//!
//! File layout (1-based group and user numbers, floats with 17 significant
//! digits):
//!
//! ```text
//! [config]
//! num_groups = 2
//! users_per_group = 1
//! ...
//!
//! [group 1]
//! center: x y z
//! user 1: x y z
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{Backend, ChannelSet, LinkModel};
use crate::error::{Error, Result};
use crate::geometry::{sample_channel, Aperture, ApertureGrid, ChannelSample, Point3, Radio, UserGeometry};

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Axis-aligned box `[x0, x1] × [y0, y1] × [z0, z1]` in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
}

impl Default for GroupBox {
    fn default() -> Self {
        Self {
            x: (-5.0, 5.0),
            y: (-5.0, 5.0),
            z: (15.0, 30.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_groups: usize,
    pub users_per_group: usize,
    pub group_box: GroupBox,
    /// Radius of the disk users are spread over, meters.
    pub spread_radius: f64,
    /// Allowed center-to-center distance between groups, meters.
    pub group_distance: (f64, f64),
    /// Total transmit power budget `P_t` in mA².
    pub power_budget: f64,
    /// Receiver noise variance in V²/m², identical for every user.
    pub noise_variance: f64,
    /// Minimum spectral efficiency per group, bit/s/Hz.
    pub rate_floors: Vec<f64>,
    pub rng_seed: u64,
    /// Gauss–Legendre points per aperture axis.
    pub grid_order: usize,
    pub aperture: Aperture,
    pub radio: Radio,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_groups: 3,
            users_per_group: 3,
            group_box: GroupBox::default(),
            spread_radius: 1.0,
            group_distance: (1.0, 5.0),
            power_budget: 1000.0,
            noise_variance: 5.6e-3,
            rate_floors: vec![1.0; 3],
            rng_seed: 0,
            grid_order: 20,
            aperture: Aperture::default(),
            radio: Radio::default(),
        }
    }
}

impl ScenarioConfig {
    /// Default configuration with `g` groups of `k` users and a common floor.
    pub fn with_groups(g: usize, k: usize, rate_floor: f64) -> Self {
        Self {
            num_groups: g,
            users_per_group: k,
            rate_floors: vec![rate_floor; g],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.num_groups == 0 {
            return bad("num_groups must be at least 1".into());
        }
        if self.users_per_group == 0 {
            return bad("users_per_group must be at least 1".into());
        }
        if !(self.power_budget > 0.0) {
            return bad(format!("power_budget must be positive, got {}", self.power_budget));
        }
        if !(self.noise_variance > 0.0) {
            return bad(format!("noise_variance must be positive, got {}", self.noise_variance));
        }
        if self.rate_floors.len() != self.num_groups {
            return bad(format!(
                "expected {} rate floors, got {}",
                self.num_groups,
                self.rate_floors.len()
            ));
        }
        if self.rate_floors.iter().any(|r| !(*r >= 0.0)) {
            return bad("rate floors must be nonnegative".into());
        }
        if !(self.spread_radius >= 0.0) {
            return bad("spread_radius must be nonnegative".into());
        }
        let (dmin, dmax) = self.group_distance;
        if !(dmin >= 0.0 && dmax >= dmin) {
            return bad(format!("invalid group distance interval [{dmin}, {dmax}]"));
        }
        let b = &self.group_box;
        if !(b.x.0 <= b.x.1 && b.y.0 <= b.y.1 && b.z.0 <= b.z.1) {
            return bad("group box bounds must be ordered".into());
        }
        if !(b.z.0 > 0.0) {
            return bad("group box must lie in front of the aperture (z > 0)".into());
        }
        if self.grid_order == 0 {
            return bad("grid_order must be at least 1".into());
        }
        Aperture::new(self.aperture.len_x, self.aperture.len_y)?;
        Radio::new(self.radio.wavelength, self.radio.impedance)?;
        Ok(())
    }

    pub fn num_users(&self) -> usize {
        self.num_groups * self.users_per_group
    }
}

/// A placed user. `group` and `index` are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioUser {
    pub group: usize,
    pub index: usize,
    pub geometry: UserGeometry,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub centers: Vec<Point3>,
    /// Users in global order `i = g * K_g + k`.
    pub users: Vec<ScenarioUser>,
    pub grid: ApertureGrid,
    /// Continuous channels aligned with `users`.
    pub channels: Vec<ChannelSample>,
}

fn draw_centers(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Point3>> {
    let b = &config.group_box;
    let (dmin, dmax) = config.group_distance;
    let mut centers: Vec<Point3> = Vec::with_capacity(config.num_groups);
    let mut attempts = 0;
    while centers.len() < config.num_groups {
        if attempts >= MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::InfeasibleGeometry {
                groups: config.num_groups,
                min: dmin,
                max: dmax,
                attempts,
            });
        }
        attempts += 1;
        let c = Point3::new(
            rng.gen_range(b.x.0..=b.x.1),
            rng.gen_range(b.y.0..=b.y.1),
            rng.gen_range(b.z.0..=b.z.1),
        );
        let ok = centers.iter().all(|p| {
            let d = (p - c).norm();
            d >= dmin && d <= dmax
        });
        if ok {
            centers.push(c);
        }
    }
    Ok(centers)
}

/// Generates a scenario; fully determined by `config` (including its seed).
pub fn generate(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let centers = draw_centers(config, &mut rng)?;
    let mut positions = Vec::with_capacity(config.num_users());
    for c in &centers {
        for _ in 0..config.users_per_group {
            let rho = config.spread_radius * rng.gen::<f64>().sqrt();
            let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            positions.push(Point3::new(c.x + rho * theta.cos(), c.y + rho * theta.sin(), c.z));
        }
    }
    Scenario::from_positions(config.clone(), centers, positions)
}

impl Scenario {
    /// Builds a scenario from explicit positions (global user order) and
    /// samples every channel.
    pub fn from_positions(config: ScenarioConfig, centers: Vec<Point3>, positions: Vec<Point3>) -> Result<Self> {
        config.validate()?;
        if positions.len() != config.num_users() {
            return Err(Error::InvalidConfig(format!(
                "expected {} user positions, got {}",
                config.num_users(),
                positions.len()
            )));
        }
        if centers.len() != config.num_groups {
            return Err(Error::InvalidConfig(format!(
                "expected {} group centers, got {}",
                config.num_groups,
                centers.len()
            )));
        }
        let grid = ApertureGrid::new(config.aperture, config.grid_order)?;
        let kg = config.users_per_group;
        let mut users = Vec::with_capacity(positions.len());
        let mut channels = Vec::with_capacity(positions.len());
        for (i, p) in positions.into_iter().enumerate() {
            let geometry = UserGeometry::co_polarized(p)?;
            let mut ch = sample_channel(&geometry, &grid, &config.radio)?;
            ch.group = i / kg;
            ch.index = i % kg;
            ch.noise_variance = config.noise_variance;
            channels.push(ch);
            users.push(ScenarioUser {
                group: i / kg,
                index: i % kg,
                geometry,
            });
        }
        Ok(Self {
            config,
            centers,
            users,
            grid,
            channels,
        })
    }

    /// Same users under a different configuration (aperture, grid, budget,
    /// floors...). Group count and size must match.
    pub fn with_config(&self, config: ScenarioConfig) -> Result<Self> {
        if config.num_groups != self.config.num_groups || config.users_per_group != self.config.users_per_group {
            return Err(Error::InvalidConfig("group layout must not change".into()));
        }
        let positions = self.users.iter().map(|u| u.geometry.position).collect();
        Self::from_positions(config, self.centers.clone(), positions)
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn user_index(&self, g: usize, k: usize) -> usize {
        g * self.config.users_per_group + k
    }

    pub fn channel_set(&self) -> ChannelSet {
        ChannelSet {
            backend: Backend::Continuous,
            samples: self.channels.iter().map(|c| c.values.clone()).collect(),
            weights: self.grid.weights.clone(),
        }
    }

    pub fn group_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let kg = self.config.users_per_group;
        (0..self.config.num_groups).map(|g| g * kg..(g + 1) * kg).collect()
    }

    /// Link model with the given Gram matrix and this scenario's layout and
    /// constraints.
    pub fn link_model_with(&self, gram: nalgebra::DMatrix<num_complex::Complex64>) -> Result<LinkModel> {
        LinkModel::new(
            gram,
            self.group_ranges(),
            self.channels.iter().map(|c| c.noise_variance).collect(),
            self.config.power_budget,
            self.config.rate_floors.clone(),
        )
    }

    /// Link model over the continuous aperture.
    pub fn link_model(&self) -> Result<LinkModel> {
        self.link_model_with(self.channel_set().gram())
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let b = &c.group_box;
        let _ = writeln!(s, "[config]");
        let _ = writeln!(s, "num_groups = {}", c.num_groups);
        let _ = writeln!(s, "users_per_group = {}", c.users_per_group);
        let _ = writeln!(
            s,
            "group_box = {} {} {} {} {} {}",
            f17(b.x.0),
            f17(b.x.1),
            f17(b.y.0),
            f17(b.y.1),
            f17(b.z.0),
            f17(b.z.1)
        );
        let _ = writeln!(s, "spread_radius = {}", f17(c.spread_radius));
        let _ = writeln!(
            s,
            "group_distance = {} {}",
            f17(c.group_distance.0),
            f17(c.group_distance.1)
        );
        let _ = writeln!(s, "power_budget = {}", f17(c.power_budget));
        let _ = writeln!(s, "noise_variance = {}", f17(c.noise_variance));
        let floors: Vec<String> = c.rate_floors.iter().map(|v| f17(*v)).collect();
        let _ = writeln!(s, "rate_floors = {}", floors.join(" "));
        let _ = writeln!(s, "rng_seed = {}", c.rng_seed);
        let _ = writeln!(s, "grid_order = {}", c.grid_order);
        let _ = writeln!(s, "aperture = {} {}", f17(c.aperture.len_x), f17(c.aperture.len_y));
        let _ = writeln!(s, "wavelength = {}", f17(c.radio.wavelength));
        let _ = writeln!(s, "impedance = {}", f17(c.radio.impedance));
        for (g, center) in self.centers.iter().enumerate() {
            let _ = writeln!(s);
            let _ = writeln!(s, "[group {}]", g + 1);
            let _ = writeln!(s, "center: {}", point17(center));
            for u in self.users.iter().filter(|u| u.group == g) {
                let _ = writeln!(s, "user {}: {}", u.index + 1, point17(&u.geometry.position));
            }
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let doc = parse_sections(text)?;
        let config_section = doc.iter().find(|s| s.name == "config").ok_or(Error::Parse {
            line: 1,
            message: "missing [config] section".into(),
        })?;
        let config = config_from_entries(&config_section.entries, &ScenarioConfig::default())?;
        config.validate()?;

        let mut centers = vec![None; config.num_groups];
        let mut positions = vec![None; config.num_users()];
        for sec in doc.iter().filter(|s| s.name != "config") {
            let g = sec
                .name
                .strip_prefix("group ")
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|g| (1..=config.num_groups).contains(g))
                .ok_or_else(|| Error::Parse {
                    line: sec.line,
                    message: format!("unexpected section [{}]", sec.name),
                })?
                - 1;
            for e in &sec.entries {
                let p = parse_point(&e.value, e.line)?;
                if e.key == "center" {
                    centers[g] = Some(p);
                } else if let Some(k) = e
                    .key
                    .strip_prefix("user ")
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .filter(|k| (1..=config.users_per_group).contains(k))
                {
                    positions[g * config.users_per_group + k - 1] = Some(p);
                } else {
                    return Err(Error::Parse {
                        line: e.line,
                        message: format!("unexpected key '{}' in [group {}]", e.key, g + 1),
                    });
                }
            }
        }
        let positions = positions
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| Error::Parse {
                    line: 0,
                    message: format!(
                        "missing position for group {} user {}",
                        i / config.users_per_group + 1,
                        i % config.users_per_group + 1
                    ),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        // a missing center defaults to the mean of the group's users
        let kg = config.users_per_group;
        let centers = centers
            .into_iter()
            .enumerate()
            .map(|(g, c)| c.unwrap_or_else(|| positions[g * kg..(g + 1) * kg].iter().sum::<Point3>() / kg as f64))
            .collect();
        Self::from_positions(config, centers, positions)
    }
}

/// Formats with 17 significant digits; round-trips every finite `f64`.
pub fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn point17(p: &Point3) -> String {
    format!("{} {} {}", f17(p.x), f17(p.y), f17(p.z))
}

/// One `key = value` or `key: value` line.
#[derive(Debug, Clone)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// A `[name]` section and its entries.
#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

/// Parses the bracketed-section text format shared by scenario and
/// experiment files. `#` starts a comment.
pub fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
            sections.push(Section {
                name: name.trim().to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let sec = sections.last_mut().ok_or(Error::Parse {
            line,
            message: "entry before any [section]".into(),
        })?;
        let split = content
            .find('=')
            .into_iter()
            .chain(content.find(':'))
            .min()
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("expected 'key = value' or 'key: value', got '{content}'"),
            })?;
        sec.entries.push(Entry {
            key: content[..split].trim().to_string(),
            value: content[split + 1..].trim().to_string(),
            line,
        });
    }
    Ok(sections)
}

fn parse_floats(value: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    value
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("field '{key}': cannot parse '{t}' as a number"),
            })
        })
        .collect()
}

fn parse_fixed<const N: usize>(value: &str, line: usize, key: &str) -> Result<[f64; N]> {
    let v = parse_floats(value, line, key)?;
    v.try_into().map_err(|v: Vec<f64>| Error::Parse {
        line,
        message: format!("field '{key}': expected {N} numbers, got {}", v.len()),
    })
}

fn parse_point(value: &str, line: usize) -> Result<Point3> {
    let [x, y, z] = parse_fixed::<3>(value, line, "position")?;
    Ok(Point3::new(x, y, z))
}

fn parse_int<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| Error::Parse {
        line,
        message: format!("field '{key}': cannot parse '{value}' as an integer"),
    })
}

/// Applies `[config]` entries on top of `base`. Unknown keys are errors.
/// A single `rate_floors` value is broadcast to every group.
pub fn config_from_entries(entries: &[Entry], base: &ScenarioConfig) -> Result<ScenarioConfig> {
    let mut c = base.clone();
    let mut floors: Option<(Vec<f64>, usize)> = None;
    for e in entries {
        let (v, line, key) = (e.value.as_str(), e.line, e.key.as_str());
        match key {
            "num_groups" => c.num_groups = parse_int(v, line, key)?,
            "users_per_group" => c.users_per_group = parse_int(v, line, key)?,
            "group_box" => {
                let [x0, x1, y0, y1, z0, z1] = parse_fixed::<6>(v, line, key)?;
                c.group_box = GroupBox {
                    x: (x0, x1),
                    y: (y0, y1),
                    z: (z0, z1),
                };
            }
            "spread_radius" => c.spread_radius = parse_fixed::<1>(v, line, key)?[0],
            "group_distance" => {
                let [a, b] = parse_fixed::<2>(v, line, key)?;
                c.group_distance = (a, b);
            }
            "power_budget" => c.power_budget = parse_fixed::<1>(v, line, key)?[0],
            "noise_variance" => c.noise_variance = parse_fixed::<1>(v, line, key)?[0],
            "rate_floors" | "rate_floor" => floors = Some((parse_floats(v, line, key)?, line)),
            "rng_seed" => c.rng_seed = parse_int(v, line, key)?,
            "grid_order" => c.grid_order = parse_int(v, line, key)?,
            "aperture" => {
                let [lx, ly] = parse_fixed::<2>(v, line, key)?;
                c.aperture = Aperture { len_x: lx, len_y: ly };
            }
            "wavelength" => c.radio.wavelength = parse_fixed::<1>(v, line, key)?[0],
            "impedance" => c.radio.impedance = parse_fixed::<1>(v, line, key)?[0],
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown config field '{key}'"),
                })
            }
        }
    }
    match floors {
        Some((f, _)) if f.len() == 1 => c.rate_floors = vec![f[0]; c.num_groups],
        Some((f, line)) if f.len() != c.num_groups => {
            return Err(Error::Parse {
                line,
                message: format!("rate_floors: expected 1 or {} values, got {}", c.num_groups, f.len()),
            })
        }
        Some((f, _)) => c.rate_floors = f,
        None if c.rate_floors.len() != c.num_groups => {
            let v = c.rate_floors.first().copied().unwrap_or(0.0);
            c.rate_floors = vec![v; c.num_groups];
        }
        None => {}
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_config(seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            grid_order: 6,
            rng_seed: seed,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn single_user_is_reproducible() {
        let cfg = ScenarioConfig {
            rng_seed: 42,
            ..ScenarioConfig::with_groups(1, 1, 0.0)
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.num_users(), 1);
        assert_eq!(a.users, b.users);
        assert_eq!(a.channels, b.channels);
    }

    #[test]
    fn zero_spread_collapses_groups() {
        let cfg = ScenarioConfig {
            spread_radius: 0.0,
            grid_order: 5,
            ..ScenarioConfig::default()
        };
        let s = generate(&cfg).unwrap();
        for g in 0..3 {
            let first = &s.channels[s.user_index(g, 0)].values;
            for k in 1..3 {
                assert_eq!(&s.channels[s.user_index(g, k)].values, first);
            }
        }
    }

    #[test]
    fn default_layout_has_nine_users_with_bounded_separation() {
        let s = generate(&small_config(3)).unwrap();
        assert_eq!(s.num_users(), 9);
        assert_eq!(s.channels.len(), 9);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = (s.centers[i] - s.centers[j]).norm();
                assert!((1.0..=5.0).contains(&d), "distance {d}");
            }
        }
    }

    #[test]
    fn impossible_separation_is_reported() {
        let cfg = ScenarioConfig {
            group_box: GroupBox {
                x: (0.0, 0.1),
                y: (0.0, 0.1),
                z: (20.0, 20.1),
            },
            group_distance: (5.0, 6.0),
            ..small_config(0)
        };
        assert!(matches!(generate(&cfg), Err(Error::InfeasibleGeometry { .. })));
    }

    #[test]
    fn text_round_trip_is_byte_identical() {
        let s = generate(&small_config(11)).unwrap();
        let text = s.to_text();
        let back = Scenario::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.users, s.users);
        assert_eq!(back.channels, s.channels);
    }

    #[test]
    fn zero_groups_fail_validation() {
        let text = "[config]\nnum_groups = 0\nusers_per_group = 1\n";
        assert!(matches!(Scenario::from_text(text), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "[config]\nnum_groups = 1\nusers_per_group = 1\nspread_radius = abc\n";
        match Scenario::from_text(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("spread_radius"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "[config]\nnum_groups = 1\nusers_per_group = 1\nbogus = 1\n";
        assert!(matches!(Scenario::from_text(text), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn hand_written_file_matches_direct_construction() {
        let text = "\
[config]
num_groups = 2
users_per_group = 2
rate_floors = 0.5
grid_order = 4

[group 1]
center: 1 0 20
user 1: 1.5 0 20
user 2: 0.5 0 20

[group 2]
center: -2 1 25
user 1: -2 1.5 25
user 2: -2 0.5 25
";
        let loaded = Scenario::from_text(text).unwrap();
        let cfg = ScenarioConfig {
            num_groups: 2,
            users_per_group: 2,
            rate_floors: vec![0.5, 0.5],
            grid_order: 4,
            ..ScenarioConfig::default()
        };
        let positions = vec![
            Point3::new(1.5, 0.0, 20.0),
            Point3::new(0.5, 0.0, 20.0),
            Point3::new(-2.0, 1.5, 25.0),
            Point3::new(-2.0, 0.5, 25.0),
        ];
        let centers = vec![Point3::new(1.0, 0.0, 20.0), Point3::new(-2.0, 1.0, 25.0)];
        let direct = Scenario::from_positions(cfg, centers, positions).unwrap();
        for (a, b) in loaded.channels.iter().zip(&direct.channels) {
            assert_eq!(a.values, b.values);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn generated_layouts_respect_constraints(seed in any::<u64>()) {
            let cfg = ScenarioConfig { grid_order: 1, ..small_config(seed) };
            let s = generate(&cfg).unwrap();
            let kg = cfg.users_per_group;
            for (i, u) in s.users.iter().enumerate() {
                prop_assert_eq!(u.group, i / kg);
                let c = s.centers[u.group];
                let off = u.geometry.position - c;
                prop_assert!(off.norm() <= cfg.spread_radius + 1e-12);
                prop_assert_eq!(off.z, 0.0);
            }
            for i in 0..cfg.num_groups {
                for j in (i + 1)..cfg.num_groups {
                    let d = (s.centers[i] - s.centers[j]).norm();
                    prop_assert!(d >= 1.0 && d <= 5.0);
                }
            }
        }
    }
}
