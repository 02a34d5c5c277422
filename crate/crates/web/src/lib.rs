//! Three browser views over the core library. Each view is a plain function
//! returning a serializable table; the `wasm_bindgen` exports hand that table
//! to the page as JSON.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use wudlab::characters::{build_character_table_guarded, z_chi_all};
use wudlab::density::alpha;
use wudlab::number::factor;
use wudlab::poly::IntPoly;
use wudlab::tuples::{target_ratios, TupleMethod};

/// Largest `q` scanned by the density view.
pub const MAX_DENSITY_Q: u64 = 20_000;
/// Largest `ℓ^e` for a character table.
pub const MAX_CHAR_MODULUS: u64 = 50_000;
/// Largest `q` and `J` for the mixing view.
pub const MAX_MIXING_Q: u64 = 2_000;
pub const MAX_MIXING_J: u32 = 12;

fn parse_poly(text: &str) -> Result<IntPoly, String> {
    let f: IntPoly = text.parse().map_err(|e: wudlab::Error| e.to_string())?;
    f.check_defining().map_err(|e| e.to_string())?;
    Ok(f)
}

#[derive(Debug, Serialize)]
pub struct DensityPoint {
    pub q: u64,
    pub alpha: String,
    pub alpha_float: f64,
    /// `α(q)·(log log 3q)^D`
    pub normalized: f64,
    pub admissible: bool,
}

#[derive(Debug, Serialize)]
pub struct DensitySeries {
    pub polynomial: String,
    pub degree: u32,
    pub points: Vec<DensityPoint>,
    /// Odd `q` in range where `α(q) = 0`.
    pub zeros: Vec<u64>,
}

/// `α(q)` for every odd `3 ≤ q ≤ q_max`.
pub fn density_series(poly: &str, q_max: u64) -> Result<DensitySeries, String> {
    let f = parse_poly(poly)?;
    if q_max > MAX_DENSITY_Q {
        return Err(format!("q_max is capped at {MAX_DENSITY_Q}"));
    }
    let mut points = Vec::new();
    let mut zeros = Vec::new();
    for q in (3..=q_max).step_by(2) {
        let fq = factor(q).map_err(|e| e.to_string())?;
        let p = alpha(&f, &fq).map_err(|e| e.to_string())?;
        if p.alpha.is_zero() {
            zeros.push(q);
        }
        points.push(DensityPoint {
            q,
            alpha: p.alpha.to_string(),
            alpha_float: p.alpha_float,
            normalized: p.lower_bound_ratio,
            admissible: p.locals.iter().all(|l| l.admissible),
        });
    }
    Ok(DensitySeries { polynomial: f.to_string(), degree: f.degree(), points, zeros })
}

#[derive(Debug, Serialize)]
pub struct CharacterPoint {
    pub t: u64,
    pub order: u64,
    pub conductor: u64,
    pub abs: f64,
    pub bound: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct CharacterPanel {
    pub polynomial: String,
    pub modulus: u64,
    pub admissible: bool,
    /// Nonprincipal characters only.
    pub points: Vec<CharacterPoint>,
    pub violations: usize,
}

/// `|Z_χ|` and its bound for every nonprincipal `χ mod ℓ^e`.
pub fn character_panel(poly: &str, ell: u64, e: u32) -> Result<CharacterPanel, String> {
    let f = parse_poly(poly)?;
    let table = build_character_table_guarded(ell, e, MAX_CHAR_MODULUS).map_err(|e| e.to_string())?;
    let points: Vec<CharacterPoint> = z_chi_all(&f, &table)
        .map_err(|e| e.to_string())?
        .into_iter()
        .skip(1)
        .map(|r| CharacterPoint { t: r.t, order: r.order, conductor: r.conductor, abs: r.abs, bound: r.bound, ok: r.ok })
        .collect();
    let violations = points.iter().filter(|p| !p.ok).count();
    Ok(CharacterPanel { polynomial: f.to_string(), modulus: table.modulus, admissible: f.is_admissible(ell), points, violations })
}

#[derive(Debug, Serialize)]
pub struct MixingPoint {
    pub j: u32,
    /// `max_w |φ(q)·#V″(w)/#V′ − 1|`
    pub max_deviation: f64,
    pub r_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct MixingSeries {
    pub polynomial: String,
    pub q: u64,
    pub vacuous: bool,
    pub admissible: bool,
    pub points: Vec<MixingPoint>,
}

/// How far `#V″` is from uniform over unit targets, for `J = 1..=j_max`.
pub fn mixing_series(poly: &str, q: u64, j_max: u32) -> Result<MixingSeries, String> {
    let f = parse_poly(poly)?;
    if q > MAX_MIXING_Q || j_max > MAX_MIXING_J {
        return Err(format!("q is capped at {MAX_MIXING_Q} and J at {MAX_MIXING_J}"));
    }
    let fq = factor(q).map_err(|e| e.to_string())?;
    let mut series = MixingSeries { polynomial: f.to_string(), q, vacuous: false, admissible: true, points: Vec::new() };
    for j in 1..=j_max {
        let r = target_ratios(&f, &fq, j, None, TupleMethod::Character).map_err(|e| e.to_string())?;
        series.vacuous = r.vacuous;
        series.admissible = r.admissible;
        if r.vacuous {
            break;
        }
        series.points.push(MixingPoint { j, max_deviation: r.max_deviation, r_bound: r.r_bound });
    }
    Ok(series)
}

fn to_json<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn density_json(poly: &str, q_max: u32) -> Result<String, JsError> {
    to_json(density_series(poly, q_max as u64))
}

#[wasm_bindgen]
pub fn characters_json(poly: &str, ell: u32, e: u32) -> Result<String, JsError> {
    to_json(character_panel(poly, ell as u64, e))
}

#[wasm_bindgen]
pub fn mixing_json(poly: &str, q: u32, j_max: u32) -> Result<String, JsError> {
    to_json(mixing_series(poly, q as u64, j_max))
}
