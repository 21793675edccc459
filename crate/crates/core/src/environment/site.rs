//! Site scatter tables: occurrence-weighted lists of (Hs, Tp, Uw) states.
//!
//! The four bundled tables are synthetic. They are generated by
//! [`generate_site`] from a handful of resource summaries (mean wave power
//! flux and wind power density) and do not reproduce any real hindcast.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const HEADER: [&str; 4] = ["hs", "tp", "uw", "occurrence"];

/// One environmental bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeaState {
    /// Significant wave height, m.
    pub hs: f64,
    /// Peak period, s.
    pub tp: f64,
    /// Hub-height mean wind speed, m/s.
    pub uw: f64,
    /// Probability of occurrence.
    pub occurrence: f64,
}

impl SeaState {
    pub fn new(hs: f64, tp: f64, uw: f64, occurrence: f64) -> Result<Self> {
        let s = Self { hs, tp, uw, occurrence };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.hs.is_finite()
            && self.tp.is_finite()
            && self.uw.is_finite()
            && self.occurrence.is_finite()
            && self.hs >= 0.0
            && self.tp > 0.0
            && self.uw >= 0.0
            && (0.0..=1.0).contains(&self.occurrence);
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid sea state {self:?}")))
        }
    }
}

/// A deployment site: an ordered, normalised list of sea states. The index
/// of a state is the index of its PTO pair in a design vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteScatter {
    pub name: String,
    /// Water depth, m, when known.
    pub depth: Option<f64>,
    states: Vec<SeaState>,
}

impl SiteScatter {
    pub fn new(name: impl Into<String>, depth: Option<f64>, states: Vec<SeaState>) -> Result<Self> {
        let name = name.into();
        if states.is_empty() {
            return Err(Error::Domain(format!("site {name} has no sea states")));
        }
        for s in &states {
            s.validate()?;
        }
        let total: f64 = states.iter().map(|s| s.occurrence).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("site {name}: occurrences sum to {total}, expected 1")));
        }
        Ok(Self { name, depth, states })
    }

    /// Builds a site from un-normalised occurrence weights.
    pub fn normalized(name: impl Into<String>, depth: Option<f64>, mut states: Vec<SeaState>) -> Result<Self> {
        let total: f64 = states.iter().map(|s| s.occurrence).sum();
        if !(total > 0.0) {
            return Err(Error::Domain(format!("occurrence weights sum to {total}")));
        }
        for s in &mut states {
            s.occurrence /= total;
        }
        Self::new(name, depth, states)
    }

    pub fn states(&self) -> &[SeaState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Serialises a site as `hs,tp,uw,occurrence` CSV.
pub fn site_to_csv(site: &SiteScatter) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for s in site.states() {
        out.push_str(&format!("{},{},{},{}\n", s.hs, s.tp, s.uw, s.occurrence));
    }
    out
}

pub fn save_site(path: impl AsRef<Path>, site: &SiteScatter) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, site_to_csv(site)).map_err(|e| Error::io(path, e))
}

/// Reads a scatter table. The site name is the file stem; depth is filled in
/// for the bundled site names.
pub fn load_site(path: impl AsRef<Path>) -> Result<SiteScatter> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "site".to_string());
    parse_site(&name, &text)
}

/// Parses CSV text. Occurrences summing to within [0.99, 1.01] are
/// renormalised; anything further off is rejected.
pub fn parse_site(name: &str, text: &str) -> Result<SiteScatter> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::data(
            name,
            None,
            format!("expected header `{}`, found `{}`", HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut states = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != 4 {
            return Err(Error::data(name, Some(row), format!("expected 4 fields, found {}", record.len())));
        }
        let mut v = [0.0; 4];
        for (j, field) in record.iter().enumerate() {
            v[j] = field
                .parse::<f64>()
                .map_err(|e| Error::data(name, Some(row), format!("field `{}`: {e}", HEADER[j])))?;
            if !v[j].is_finite() {
                return Err(Error::data(name, Some(row), format!("field `{}` is not finite", HEADER[j])));
            }
            if v[j] < 0.0 {
                return Err(Error::data(name, Some(row), format!("negative `{}` = {}", HEADER[j], v[j])));
            }
        }
        if v[1] == 0.0 {
            return Err(Error::data(name, Some(row), "peak period must be positive"));
        }
        if v[3] > 1.0 {
            return Err(Error::data(name, Some(row), format!("occurrence {} exceeds 1", v[3])));
        }
        states.push(SeaState {
            hs: v[0],
            tp: v[1],
            uw: v[2],
            occurrence: v[3],
        });
    }
    if states.is_empty() {
        return Err(Error::data(name, None, "no sea states"));
    }
    let total: f64 = states.iter().map(|s| s.occurrence).sum();
    if !(0.99..=1.01).contains(&total) {
        return Err(Error::data(name, None, format!("occurrences sum to {total}, outside [0.99, 1.01]")));
    }
    let depth = BUNDLED_SITES.iter().find(|p| p.name == name).map(|p| p.depth);
    if (total - 1.0).abs() <= 1e-12 {
        // Already normalised; keep the values bit-exact.
        SiteScatter::new(name, depth, states)
    } else {
        SiteScatter::normalized(name, depth, states)
    }
}

/// Resource summary a synthetic scatter table is generated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteParams {
    pub name: &'static str,
    pub depth: f64,
    /// Centre of the peak period distribution, s.
    pub tp_mean: f64,
    /// Target mean wave power flux, kW/m.
    pub wave_power_kw_per_m: f64,
    /// Target mean wind power density, kW/m^2.
    pub wind_power_kw_per_m2: f64,
}

/// Resource summaries of the bundled sites. Cliff Head values are assumed.
pub const BUNDLED_SITES: [SiteParams; 4] = [
    SiteParams {
        name: "sydney",
        depth: 100.0,
        tp_mean: 9.5,
        wave_power_kw_per_m: 19.7,
        wind_power_kw_per_m2: 1.07,
    },
    SiteParams {
        name: "port_lincoln",
        depth: 70.0,
        tp_mean: 12.5,
        wave_power_kw_per_m: 51.7,
        wind_power_kw_per_m2: 0.68,
    },
    SiteParams {
        name: "cliff_head",
        depth: 20.0,
        tp_mean: 12.0,
        wave_power_kw_per_m: 35.0,
        wind_power_kw_per_m2: 0.80,
    },
    SiteParams {
        name: "gippsland",
        depth: 25.0,
        tp_mean: 7.5,
        wave_power_kw_per_m: 4.5,
        wind_power_kw_per_m2: 0.67,
    },
];

const HS_FACTORS: [f64; 5] = [0.45, 0.7, 1.0, 1.35, 1.8];
const HS_WEIGHTS: [f64; 5] = [0.15, 0.3, 0.3, 0.17, 0.08];
const TP_FACTORS: [f64; 4] = [0.8, 0.93, 1.07, 1.25];
const TP_WEIGHTS: [f64; 4] = [0.2, 0.3, 0.3, 0.2];
const RHO_WATER: f64 = 1025.0;
const RHO_AIR: f64 = 1.225;
const G: f64 = 9.81;

/// Generates a 20-state table (5 Hs bins by 4 Tp bins, ordered by Hs then
/// Tp) whose mean wave power flux and mean wind power density match the
/// targets up to the rounding of the written values.
///
/// Deep-water flux `rho g^2 Hs^2 Te / (64 pi)` with `Te = 0.9 Tp`; wind
/// speed grows with the square root of Hs.
pub fn generate_site(params: &SiteParams) -> SiteScatter {
    let flux_coef = RHO_WATER * G * G / (64.0 * PI) * 0.9 / 1000.0;
    let mut cells = Vec::with_capacity(20);
    for (hf, hw) in HS_FACTORS.iter().zip(HS_WEIGHTS) {
        for (tf, tw) in TP_FACTORS.iter().zip(TP_WEIGHTS) {
            cells.push((*hf, params.tp_mean * tf, hw * tw));
        }
    }
    let unit_flux: f64 = cells.iter().map(|(hf, tp, o)| o * flux_coef * hf * hf * tp).sum();
    let hs_scale = (params.wave_power_kw_per_m / unit_flux).sqrt();
    let unit_wind: f64 = cells.iter().map(|(hf, _, o)| o * 0.5 * RHO_AIR * hf.powf(1.5) / 1000.0).sum();
    let u_scale = (params.wind_power_kw_per_m2 / unit_wind).cbrt();

    let round = |x: f64, d: i32| {
        let p = 10f64.powi(d);
        (x * p).round() / p
    };
    let states = cells
        .iter()
        .map(|&(hf, tp, o)| SeaState {
            hs: round(hs_scale * hf, 3),
            tp: round(tp, 2),
            uw: round(u_scale * hf.sqrt(), 2),
            occurrence: round(o, 6),
        })
        .collect();
    SiteScatter::new(params.name, Some(params.depth), states).expect("generated site is valid")
}

/// One of the bundled synthetic sites by name.
pub fn bundled_site(name: &str) -> Result<SiteScatter> {
    let text = match name {
        "sydney" => include_str!("../../data/sites/sydney.csv"),
        "port_lincoln" => include_str!("../../data/sites/port_lincoln.csv"),
        "cliff_head" => include_str!("../../data/sites/cliff_head.csv"),
        "gippsland" => include_str!("../../data/sites/gippsland.csv"),
        other => return Err(Error::Config(format!("unknown bundled site `{other}`"))),
    };
    parse_site(name, text)
}
