use krein_core::clifford::real_structure::garling_consistent;
use krein_core::detect;
use krein_core::ideals::{self, IdempotentIdeal};
use krein_core::lattice::{self, LatticeSpec};
use krein_core::linalg::CMat;
use krein_core::spinor::{self, Case, GammaSet, SpinorModule};
use krein_core::verify::{self, Suite};
use krein_core::{AdmissibleRealStructure, Multivector, Result, Signature};
use serde_json::{json, Value};

/// Residual tolerance for assembled operators.
const OPERATOR_TOL: f64 = 1e-12;
const ROUNDTRIP_TOL: f64 = 1e-13;
/// Spectra of non-normal operators carry square-root errors from Jordan blocks.
const SPECTRUM_TOL: f64 = 1e-6;
const NORM_TOL: f64 = 1e-9;

pub struct CommandResult {
    pub command: &'static str,
    pub ok: bool,
    pub payload: Value,
}

impl CommandResult {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "status": if self.ok { "ok" } else { "fail" },
            "payload": self.payload,
        })
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Row-major `[re, im]` pairs.
pub fn matrix_json(m: &CMat) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    to_json(&rows)
}

/// `c` for the canonical structure, otherwise a multivector `b`.
fn structure(sig: Signature, spec: &str) -> Result<AdmissibleRealStructure> {
    if spec.trim() == "c" {
        return Ok(AdmissibleRealStructure::canonical(sig));
    }
    AdmissibleRealStructure::new(Multivector::parse(spec, sig)?)
}

pub fn ko_table(case: Case, ns: &[usize]) -> Result<CommandResult> {
    let mut rows = Vec::new();
    let mut ok = true;
    for &n in ns {
        let sig = case.signature(n)?;
        let k = spinor::ko_signs(sig, case)?;
        let matches = [k.eps, k.eps_dprime, k.eps_tilde, k.kappa, k.kappa_tilde] == verify::reference_ko_row(case, n)
            && k.ko_dim_mod8 == verify::reference_ko_dim(case, n);
        ok &= matches;
        rows.push(json!({
            "n": n,
            "signature": [sig.p(), sig.q()],
            "ko_dim": k.ko_dim_mod8,
            "metric_dim": k.metric_dim_mod8,
            "j": { "eps": k.eps, "eps_dprime": k.eps_dprime, "kappa": k.kappa },
            "charge": { "eps_tilde": k.eps_tilde, "kappa_tilde": k.kappa_tilde },
            "matches_reference": matches,
        }));
    }
    Ok(CommandResult { command: "ko-table", ok, payload: json!({ "case": case.as_str(), "rows": rows }) })
}

pub fn gammas(p: usize, q: usize) -> Result<CommandResult> {
    let sig = Signature::new(p, q)?;
    let m = SpinorModule::new(sig)?;
    let residual = m.gammas.anticommutation_residual();
    let payload = json!({
        "signature": [p, q],
        "dim": m.gammas.dim(),
        "gammas": m.gammas.gammas().iter().map(matrix_json).collect::<Vec<_>>(),
        "beta": matrix_json(m.krein.matrix()),
        "chirality": matrix_json(&m.chirality),
        "charge": matrix_json(m.charge.matrix()),
        "graded_charge": matrix_json(m.graded_charge().matrix()),
        "anticommutation_residual": residual,
    });
    Ok(CommandResult { command: "gammas", ok: residual <= OPERATOR_TOL, payload })
}

pub fn cone(p: usize, q: usize, v: &[f64]) -> Result<CommandResult> {
    let sig = Signature::new(p, q)?;
    let m = SpinorModule::new(sig)?;
    let verdict = detect::cone_test(&m.gammas, &m.krein, v)?;
    let payload = json!({
        "signature": [p, q],
        "v": v,
        "in_cone": verdict.in_cone,
        "component": to_json(&verdict.component),
        "inertia": verdict.definiteness.inertia(),
        "near_null": verdict.near_null,
        "quadratic_form": sig.quadratic_form(v),
    });
    Ok(CommandResult { command: "cone", ok: true, payload })
}

pub fn garling(p: usize, q: usize, b: &str) -> Result<CommandResult> {
    let sig = Signature::new(p, q)?;
    let sigma = structure(sig, b)?;
    let report = sigma.gram_signature();
    let payload = json!({
        "signature": [p, q],
        "b": sigma.b().to_string(),
        "is_euclidean": sigma.is_euclidean(),
        "classification": report.classification.as_str(),
        "inertia": report.inertia(),
    });
    Ok(CommandResult { command: "garling", ok: garling_consistent(&sigma), payload })
}

pub fn default_target(source: Signature) -> Case {
    if source.is_euclidean() {
        Case::Antilorentz
    } else {
        Case::Euclidean
    }
}

pub fn wick(p: usize, q: usize, sites: usize, to: Option<Case>, k: usize, seed: u64) -> Result<CommandResult> {
    let sig = Signature::new(p, q)?;
    let to = to.unwrap_or_else(|| default_target(sig));
    let report = lattice::wick_demo(sig, sites, to, k, seed)?;
    let spec = LatticeSpec::new(sig, sites, 1.0)?;
    let d = lattice::build_flat_dirac(&spec, &GammaSet::new(sig))?;
    let mut ev = lattice::momentum_eigenvalues(&d)?;
    let mut neg: Vec<_> = ev.iter().map(|z| -z).collect();
    lattice::sort_spectrum(&mut ev);
    lattice::sort_spectrum(&mut neg);
    let pairing = ev.iter().zip(&neg).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let r = &report.residuals;
    let ok = r.selfadjoint <= OPERATOR_TOL
        && r.anticommute <= OPERATOR_TOL
        && r.direct_compare <= OPERATOR_TOL
        && r.symbol <= OPERATOR_TOL
        && r.roundtrip <= ROUNDTRIP_TOL
        && pairing <= SPECTRUM_TOL;
    let mut payload = to_json(&report);
    payload["spectrum_pairing_residual"] = json!(pairing);
    payload["tolerances"] = json!({ "operator": OPERATOR_TOL, "roundtrip": ROUNDTRIP_TOL, "spectrum": SPECTRUM_TOL });
    Ok(CommandResult { command: "wick", ok, payload })
}

pub fn csnorm(p: usize, q: usize, b: &str, a: &str) -> Result<CommandResult> {
    let sig = Signature::new(p, q)?;
    let sigma = structure(sig, b)?;
    let a = Multivector::parse(a, sig)?;
    let norm = ideals::cstar_norm(&sigma, &a)?;
    let rho = ideals::rho_norm(&sigma, &a)?;
    let identity = ideals::cstar_identity_check(&sigma, &a)?;
    let scale = norm.max(1.0);
    let ok = identity <= NORM_TOL * scale * scale && (norm - rho).abs() <= NORM_TOL * scale;
    let payload = json!({
        "signature": [p, q],
        "b": sigma.b().to_string(),
        "a": a.to_string(),
        "norm": norm,
        "rho_norm": rho,
        "cstar_identity_residual": identity,
    });
    Ok(CommandResult { command: "csnorm", ok, payload })
}

pub fn ideal(p: usize, q: usize, b: &str, e: Option<&str>, flip: &[u8]) -> Result<CommandResult> {
    let sig = Signature::new(p, q)?;
    let sigma = structure(sig, b)?;
    let ideal = match e {
        Some(text) => IdempotentIdeal::new(Multivector::parse(text, sig)?)?,
        None => {
            let flags: Vec<bool> = flip.iter().map(|&x| x != 0).collect();
            ideals::build_primitive_idempotent(sig, &flags)?
        }
    };
    let report = ideals::ideal_report(&ideal, &sigma)?;
    let ok = verify::ideal_case_holds(&ideal, &sigma)?;
    Ok(CommandResult { command: "ideal", ok, payload: to_json(&report) })
}

pub fn verify(suite: Suite, seed: u64) -> Result<CommandResult> {
    let report = verify::run(suite, seed);
    Ok(CommandResult { command: "verify", ok: report.ok, payload: to_json(&report) })
}
