//! Browser bindings: each export takes plain numbers, runs a construction
//! or search from the `qdesign` crate, and returns a JSON string. Errors
//! come back as a thrown JS string.
//!
//! The functions are ordinary Rust functions apart from the `wasm_bindgen`
//! glue, so the unit tests below exercise them on the host.

use qdesign::jsonio::{vector_to_json, PlaneJson};
use qdesign::linalg::{outer, random_unit_vector, trace};
use qdesign::{
    build_affine_plane, build_mubs, build_quantum_net, check_affine_axioms,
    check_striations_unbiased, search_fiducial, verify_net, verify_sic, wh_orbit,
    wigner_function, FiniteField, SearchConfig, DEFAULT_TOL,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest plane order the page offers; keeps payloads small.
const MAX_ORDER: u32 = 9;
/// Search caps so a click never locks the tab for more than a moment.
const MAX_SEARCH_DIM: u32 = 8;
const MAX_RESTARTS: u32 = 64;

fn num(x: f64) -> serde_json::Value {
    json!(x)
}

/// Affine plane of prime-power `order`: incidence, striations, and the
/// axiom/unbiasedness verdicts, as one JSON object.
#[wasm_bindgen]
pub fn plane_json(order: u32) -> Result<String, String> {
    if order > MAX_ORDER {
        return Err(format!("order {order} exceeds the demo cap of {MAX_ORDER}"));
    }
    let field = FiniteField::of_order(order).map_err(|e| e.to_string())?;
    let plane = build_affine_plane(&field);

    let axioms = check_affine_axioms(plane.incidence());
    let striations = plane.striations();
    let mut unbiased = true;
    for i in 0..striations.len() {
        for j in i + 1..striations.len() {
            unbiased &= check_striations_unbiased(&striations[i], &striations[j])
                .map_err(|e| e.to_string())?;
        }
    }

    let body = json!({
        "plane": PlaneJson::from(&plane),
        "axioms_pass": axioms.all_pass(),
        "striations_unbiased": unbiased,
    });
    Ok(body.to_string())
}

/// Discrete Wigner function of a state in prime dimension `order`.
///
/// `state` is `"basis"` (the first standard basis state), `"uniform"`
/// (the flat superposition), or `"random"` (a pure state drawn from the
/// seeded generator). Returns the point values, the per-line sums, and the
/// Born probabilities they must reproduce.
#[wasm_bindgen]
pub fn wigner_json(order: u32, state: &str, seed: u32) -> Result<String, String> {
    if order > MAX_ORDER {
        return Err(format!("order {order} exceeds the demo cap of {MAX_ORDER}"));
    }
    let field = FiniteField::of_order(order).map_err(|e| e.to_string())?;
    let plane = build_affine_plane(&field);
    let mubs = build_mubs(&field).map_err(|e| e.to_string())?;
    let net = build_quantum_net(&mubs, &plane).map_err(|e| e.to_string())?;
    let n = net.dim();

    let psi = match state {
        "basis" => {
            let mut v = qdesign::linalg::CVector::zeros(n);
            v[0] = qdesign::linalg::C64::new(1.0, 0.0);
            v
        }
        "uniform" => {
            let amp = 1.0 / (n as f64).sqrt();
            qdesign::linalg::CVector::from_element(n, qdesign::linalg::C64::new(amp, 0.0))
        }
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(u64::from(seed));
            random_unit_vector(n, &mut rng)
        }
        other => return Err(format!("unknown state kind {other:?}")),
    };
    let rho = outer(&psi);

    let w = wigner_function(&rho, &net).map_err(|e| e.to_string())?;
    let lines = net.plane().incidence().lines();
    let mut line_sums = Vec::with_capacity(lines.len());
    let mut born = Vec::with_capacity(lines.len());
    let mut max_born_deviation: f64 = 0.0;
    for (li, line) in lines.iter().enumerate() {
        let s = w.line_sum(line);
        let p = trace(&(net.projector(li) * &rho)).re;
        max_born_deviation = max_born_deviation.max((s - p).abs());
        line_sums.push(num(s));
        born.push(num(p));
    }
    let net_report = verify_net(&net, DEFAULT_TOL);

    let body = json!({
        "dim": n,
        "state": state,
        "seed": seed,
        "values": w.values(),
        "sum": w.sum(),
        "lines": lines,
        "line_sums": line_sums,
        "born": born,
        "max_born_deviation": max_born_deviation,
        "striation_labels": plane.striations().iter().map(|s| s.label().to_string())
            .collect::<Vec<_>>(),
        "net_pass": net_report.pass,
    });
    Ok(body.to_string())
}

/// Numerical SIC search in dimension `dim`: minimizes the covariant frame
/// potential over Weyl–Heisenberg orbits from `restarts` seeded starts,
/// then reports the winning orbit's Gram matrix of squared overlaps.
#[wasm_bindgen]
pub fn sic_search_json(dim: u32, seed: u32, restarts: u32) -> Result<String, String> {
    if !(2..=MAX_SEARCH_DIM).contains(&dim) {
        return Err(format!("dim must be between 2 and {MAX_SEARCH_DIM}"));
    }
    if !(1..=MAX_RESTARTS).contains(&restarts) {
        return Err(format!("restarts must be between 1 and {MAX_RESTARTS}"));
    }
    let n = dim as usize;
    let cfg = SearchConfig {
        restarts: restarts as usize,
        seed: u64::from(seed),
        ..SearchConfig::default()
    };
    let fiducial = search_fiducial(n, &cfg);
    let candidate = wh_orbit(&fiducial);
    let report = verify_sic(&candidate, 1e-8);

    let count = n * n;
    let mut gram = vec![vec![0.0f64; count]; count];
    for (i, vi) in candidate.vectors().iter().enumerate() {
        for (j, vj) in candidate.vectors().iter().enumerate() {
            gram[i][j] = vi.dotc(vj).norm_sqr();
        }
    }

    let body = json!({
        "dim": n,
        "seed": seed,
        "restarts": restarts,
        "residual": fiducial.residual(),
        "max_overlap_deviation": report.max_overlap_deviation,
        "povm_resolution_deviation": report.povm_resolution_deviation,
        "gram_rank": report.gram_rank,
        "expected_rank": report.expected_rank,
        "target_overlap": 1.0 / (n as f64 + 1.0),
        "gram": gram,
        "fiducial": vector_to_json(fiducial.vector()),
        "pass": report.pass,
    });
    Ok(body.to_string())
}
