//! Seeded generation of hospital-area instances.
//!
//! Coordinates come from ChaCha8 seeded through `seed_from_u64`, mapped to
//! `[0, 1)` by taking the top 53 bits of each `u64` draw. Both steps are
//! frozen under [`PRNG_ID`] so files can name the stream that produced them.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Asset, AssetType, Instance, Provenance};

/// Identifier of the frozen generator stream recorded in generated instances.
pub const PRNG_ID: &str = "chacha8-seed_from_u64-u53/v1";

pub const DEFAULT_AREA: f64 = 1000.0;
pub const DEFAULT_DRONES: usize = 5;
pub const DEFAULT_CAPACITY: f64 = 5.5;
pub const DEFAULT_SPEED: f64 = 20.0;
pub const DEFAULT_ENDURANCE: f64 = 780.0;

/// The four outdoor asset types with tunable default demand and service time.
pub fn default_catalog() -> Vec<AssetType> {
    vec![
        AssetType::new(1, "bench", 0.3, 60.0),
        AssetType::new(2, "wheelchair", 0.4, 90.0),
        AssetType::new(3, "ambulance", 1.2, 240.0),
        AssetType::new(4, "playground", 1.0, 180.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DepotPlacement {
    Corner,
    Center,
    Explicit(f64, f64),
}

impl std::str::FromStr for DepotPlacement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corner" => Ok(Self::Corner),
            "center" => Ok(Self::Center),
            other => {
                let parsed = other
                    .split_once(',')
                    .and_then(|(x, y)| Some((x.trim().parse().ok()?, y.trim().parse().ok()?)));
                parsed
                    .map(|(x, y)| Self::Explicit(x, y))
                    .ok_or_else(|| Error::Parse(format!("depot must be corner, center or X,Y; got `{other}`")))
            }
        }
    }
}

impl std::fmt::Display for DepotPlacement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Corner => f.write_str("corner"),
            Self::Center => f.write_str("center"),
            Self::Explicit(x, y) => write!(f, "{x},{y}"),
        }
    }
}

impl TryFrom<String> for DepotPlacement {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DepotPlacement> for String {
    fn from(d: DepotPlacement) -> String {
        d.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub counts: Vec<(AssetType, usize)>,
    pub area_width: f64,
    pub area_height: f64,
    pub depot: DepotPlacement,
    pub drones: usize,
    pub capacity: f64,
    pub speed: f64,
    pub endurance: f64,
}

impl ScenarioConfig {
    /// Default fleet and area with the given per-type counts.
    pub fn with_counts(seed: u64, counts: Vec<(AssetType, usize)>) -> Self {
        Self {
            seed,
            counts,
            area_width: DEFAULT_AREA,
            area_height: DEFAULT_AREA,
            depot: DepotPlacement::Corner,
            drones: DEFAULT_DRONES,
            capacity: DEFAULT_CAPACITY,
            speed: DEFAULT_SPEED,
            endurance: DEFAULT_ENDURANCE,
        }
    }

    /// `n` assets spread as evenly as possible over the default catalog.
    pub fn with_asset_count(seed: u64, n: usize) -> Self {
        Self::with_counts(seed, split_counts(&default_catalog(), n))
    }

    pub fn total_assets(&self) -> usize {
        self.counts.iter().map(|(_, c)| c).sum()
    }
}

/// Splits `n` over `catalog` round-robin; earlier types get the remainder.
pub fn split_counts(catalog: &[AssetType], n: usize) -> Vec<(AssetType, usize)> {
    let k = catalog.len().max(1);
    catalog
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), n / k + usize::from(i < n % k)))
        .collect()
}

/// Parses `type=count` pairs; a type is named or given by id.
pub fn parse_counts(catalog: &[AssetType], specs: &[String]) -> Result<Vec<(AssetType, usize)>> {
    let mut counts: Vec<(AssetType, usize)> = Vec::new();
    for spec in specs {
        let (name, count) = spec
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("count `{spec}` is not of the form type=count")))?;
        let name = name.trim();
        let ty = catalog
            .iter()
            .find(|t| t.name == name || t.id.to_string() == name)
            .ok_or_else(|| {
                let known: Vec<&str> = catalog.iter().map(|t| t.name.as_str()).collect();
                Error::Parse(format!("unknown asset type `{name}` (known: {})", known.join(", ")))
            })?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("count `{spec}` is not a non-negative integer")))?;
        match counts.iter_mut().find(|(t, _)| t.id == ty.id) {
            Some(entry) => entry.1 += count,
            None => counts.push((ty.clone(), count)),
        }
    }
    Ok(counts)
}

#[inline]
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws a fresh instance. Assets are drawn type by type in `counts` order,
/// x before y, and numbered in draw order.
pub fn generate_instance(config: &ScenarioConfig) -> Result<Instance> {
    if config.total_assets() == 0 {
        return Err(Error::EmptyInstance);
    }
    if !(config.area_width > 0.0 && config.area_height > 0.0) {
        return Err(Error::InvalidParameter("area dimensions must be positive".into()));
    }
    let (depot_x, depot_y) = match config.depot {
        DepotPlacement::Corner => (0.0, 0.0),
        DepotPlacement::Center => (config.area_width / 2.0, config.area_height / 2.0),
        DepotPlacement::Explicit(x, y) => (x, y),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut assets = Vec::with_capacity(config.total_assets());
    let mut catalog: Vec<AssetType> = Vec::new();
    for (ty, count) in &config.counts {
        if *count > 0 && !catalog.iter().any(|t| t.id == ty.id) {
            catalog.push(ty.clone());
        }
        for _ in 0..*count {
            let x = unit(&mut rng) * config.area_width;
            let y = unit(&mut rng) * config.area_height;
            assets.push(Asset {
                id: assets.len() + 1,
                type_id: ty.id,
                x,
                y,
            });
        }
    }

    Ok(Instance {
        area_width: config.area_width,
        area_height: config.area_height,
        depot_x,
        depot_y,
        assets,
        catalog,
        drones: config.drones,
        capacity: config.capacity,
        speed: config.speed,
        endurance: config.endurance,
        provenance: Some(Provenance {
            prng: PRNG_ID.to_string(),
            seed: config.seed,
        }),
    })
}

/// SplitMix64 finalizer, used to derive per-run seeds.
pub fn mix_seed(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `run` at size `n`, derived from `base`.
pub fn derive_seed(base: u64, n: usize, run: usize) -> u64 {
    mix_seed(mix_seed(mix_seed(base) ^ n as u64) ^ run as u64)
}
