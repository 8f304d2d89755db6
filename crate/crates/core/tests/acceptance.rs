//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use krein_core::clifford::real_structure::garling_consistent;
use krein_core::detect::{self, CausalCharacter};
use krein_core::ideals::{self, IdempotentIdeal};
use krein_core::lattice;
use krein_core::linalg::{self, FormClass};
use krein_core::sample;
use krein_core::spinor::{self, Case, SpinorModule};
use krein_core::verify::{self, reference_ko_dim, reference_ko_row};
use krein_core::{AdmissibleRealStructure, BladeIndex, Multivector, Result, Signature};

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn sig(p: usize, q: usize) -> Signature {
    Signature::new(p, q).unwrap()
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn ko_tables() -> Result<Outcome> {
    let mut bad = Vec::new();
    for case in Case::ALL {
        for n in [2, 4, 6, 8] {
            let k = spinor::ko_signs(case.signature(n)?, case)?;
            let row = [k.eps, k.eps_dprime, k.eps_tilde, k.kappa, k.kappa_tilde];
            if row != reference_ko_row(case, n) || k.ko_dim_mod8 != reference_ko_dim(case, n) {
                bad.push(format!("{case} n={n}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("60 sign entries, mismatches: {bad:?}"))
}

fn garling() -> Result<Outcome> {
    let sigs = verify::signatures_with(&[2, 4, 6]);
    let mut bad = 0;
    for &s in &sigs {
        for sigma in [AdmissibleRealStructure::canonical(s), AdmissibleRealStructure::euclidean_for(s)] {
            bad += usize::from(!garling_consistent(&sigma));
        }
    }
    outcome(bad == 0, format!("{} structures, {bad} violations", 2 * sigs.len()))
}

fn robinson() -> Result<Outcome> {
    let sigs = verify::signatures_with(&[2, 4, 6]);
    let mut bad = Vec::new();
    for &s in &sigs {
        let m = SpinorModule::new(s)?;
        if s.q() > 0 && linalg::classify_hermitian(m.krein.matrix())?.classification != FormClass::Neutral {
            bad.push(format!("beta on {s}"));
        }
        let sigma = AdmissibleRealStructure::euclidean_for(s);
        let bs = spinor::sigma_compatible_product(&m.krein, &m.gammas, sigma.b())?;
        if !linalg::classify_hermitian(&bs)?.classification.is_definite() {
            bad.push(format!("beta_sigma on {s}"));
        }
    }
    outcome(bad.is_empty(), format!("{} signatures, violations: {bad:?}", sigs.len()))
}

fn cone_oracle() -> Result<Outcome> {
    let mut rng = sample::rng(sample::DEFAULT_SEED);
    let mut bad = 0;
    let mut compared = 0;
    for &(p, q) in &verify::CONE_SIGS {
        let s = sig(p, q);
        let m = SpinorModule::new(s)?;
        for _ in 0..1000 {
            let v = sample::ball_vector(s.n(), &mut rng);
            if s.quadratic_form(&v).abs() < 1e-6 {
                continue;
            }
            compared += 1;
            let verdict = detect::cone_test(&m.gammas, &m.krein, &v)?;
            let timelike = detect::cone_membership_oracle(s, &v)? == CausalCharacter::Timelike;
            bad += usize::from(verdict.in_cone != timelike);
        }
    }
    outcome(bad == 0, format!("{compared} non-near-null vectors, {bad} disagreements"))
}

fn flat_example() -> Result<Outcome> {
    let rep = lattice::wick_demo(sig(4, 0), 4, Case::Antilorentz, 8, sample::DEFAULT_SEED)?;
    let r = &rep.residuals;
    let ok = rep.target == sig(1, 3)
        && r.direct_compare <= 1e-12
        && r.selfadjoint <= 1e-12
        && r.anticommute <= 1e-12
        && r.roundtrip <= 1e-13;
    outcome(
        ok,
        format!(
            "target {} direct {:.1e} selfadjoint {:.1e} anticommute {:.1e} roundtrip {:.1e}",
            rep.target, r.direct_compare, r.selfadjoint, r.anticommute, r.roundtrip
        ),
    )
}

fn wick_signs() -> Result<Outcome> {
    let mut bad = Vec::new();
    for n in [2, 4, 6, 8] {
        let al = Case::Antilorentz.signature(n)?;
        if !spinor::wick_sign_transition(Case::Antilorentz, al, &Multivector::generator(al, 1))?.holds {
            bad.push(format!("antilorentz n={n}"));
        }
        let lo = Case::Lorentz.signature(n)?;
        let b = AdmissibleRealStructure::from_vector(&Multivector::generator(lo, n), true)?;
        if !spinor::wick_sign_transition(Case::Lorentz, lo, b.b())?.holds {
            bad.push(format!("lorentz n={n}"));
        }
    }
    outcome(bad.is_empty(), format!("8 transitions, violations: {bad:?}"))
}

fn krein_positivity() -> Result<Outcome> {
    let mut rng = sample::rng(sample::DEFAULT_SEED);
    let mut shift = 0;
    for s in [sig(1, 3), sig(1, 5)] {
        shift += verify::chi_shift_disagreements(s, 500, &mut rng)?;
    }
    let mut future = 0;
    for t in [-0.9, 0.0, 0.9] {
        future += usize::from(!verify::dominant_part_is_future(&verify::paired_rotation_family(sig(1, 3), t))?);
    }
    for s in [sig(1, 3), sig(1, 5)] {
        for a in verify::krein_positive_odd_elements(s, 200, &mut rng)? {
            future += usize::from(!verify::dominant_part_is_future(&a)?);
        }
    }
    let mut neutral = 0;
    for s in [sig(1, 3), sig(1, 5)] {
        let m = SpinorModule::new(s)?;
        for _ in 0..50 {
            let w = sample::spacelike(s, 0.05, &mut rng);
            neutral += usize::from(!detect::half_spinor_neutrality(&m.krein, &m.chirality, &m.gammas, &w)?.neutral);
        }
    }
    outcome(
        shift + future + neutral == 0,
        format!("chi-shift disagreements {shift}/1000, future-part failures {future}/403, non-neutral {neutral}/100"),
    )
}

fn idempotents() -> Result<Outcome> {
    let s = sig(1, 1);
    let e = (Multivector::one(s) + Multivector::blade(s, BladeIndex::from_indices(&[1, 2]), 1.0)).scale(0.5);
    let g = ideals::restricted_sigma_product(&IdempotentIdeal::new(e)?, &AdmissibleRealStructure::canonical(s))?;
    let witness = g.isotropic && linalg::max_abs(&g.gram) == 0.0;

    let mut checked = 0;
    let mut bad = 0;
    for &s in &verify::signatures_with(&[2, 4, 6]) {
        for flip in [vec![], vec![true], vec![false, true]] {
            let ideal = ideals::build_primitive_idempotent(s, &flip)?;
            for sigma in [AdmissibleRealStructure::canonical(s), AdmissibleRealStructure::euclidean_for(s)] {
                if ideals::restricted_sigma_product(&ideal, &sigma)?.isotropic {
                    continue;
                }
                checked += 1;
                bad += usize::from(!verify::ideal_case_holds(&ideal, &sigma)?);
            }
        }
    }
    outcome(witness && bad == 0, format!("witness gram zero: {witness}; {checked} non-degenerate cases, {bad} failures"))
}

fn cstar_structure() -> Result<Outcome> {
    let mut rng = sample::rng(sample::DEFAULT_SEED);
    let (mut identity, mut rho): (f64, f64) = (0.0, 0.0);
    for sigma in verify::cstar_structures()? {
        for _ in 0..100 {
            let a = sample::multivector(sigma.signature(), &mut rng);
            let n = ideals::cstar_norm(&sigma, &a)?;
            identity = identity.max(ideals::cstar_identity_check(&sigma, &a)? / (n * n));
            rho = rho.max((n - ideals::rho_norm(&sigma, &a)?).abs() / n);
        }
    }
    // Isometry between distinct Euclidean structures: b = e_1 against a
    // random boost of it, 50 elements per pair.
    let (mut literal, mut swapped, mut half): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in [sig(1, 1), sig(1, 3)] {
        let sigma = AdmissibleRealStructure::from_vector(&Multivector::generator(s, 1), false)?;
        for _ in 0..2 {
            let other = verify::random_boosted_structure(s, &mut rng)?;
            let g = sigma.b() * &other.b_inverse();
            for _ in 0..50 {
                let a = sample::multivector(s, &mut rng);
                let n = ideals::cstar_norm(&sigma, &a)?;
                literal = literal.max(ideals::ad_isometry_residual(&sigma, &other, &a)? / n);
                let image = ideals::adjoint_action(&g, &a)?;
                swapped = swapped.max((ideals::cstar_norm(&sigma, &image)? - ideals::cstar_norm(&other, &a)?).abs() / n);
                half = half.max(ideals::half_angle_isometry_residual(&sigma, &other, &a)? / n);
            }
        }
    }
    println!("    info: |norm_sigma(Ad_g a) - norm_sigma'(a)| for g = b b'^-1: {swapped:.3e}");
    println!("    info: half-angle g = (b' b^-1)^(1/2) residual: {half:.3e}");
    outcome(
        identity <= 1e-9 && rho <= 1e-9 && literal <= 1e-9,
        format!("C*-identity {identity:.1e}, rho-norm gap {rho:.1e}, Ad_(b b'^-1) isometry {literal:.3e} (relative)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, Criterion); 9] = [
        ("1 KO tables", Duration::from_secs(10), ko_tables),
        ("2 Garling alternative", Duration::from_secs(30), garling),
        ("3 Robinson alternative", Duration::from_secs(30), robinson),
        ("4 light-cone oracle agreement", Duration::from_secs(60), cone_oracle),
        ("5 flat lattice Wick rotation", Duration::from_secs(60), flat_example),
        ("6 Wick sign transitions", Duration::from_secs(60), wick_signs),
        ("7 Krein positivity", Duration::from_secs(60), krein_positivity),
        ("8 algebraic spinor idempotents", Duration::from_secs(60), idempotents),
        ("9 C*-structure", Duration::from_secs(60), cstar_structure),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && took < budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        println!(
            "{} criterion {name}: {detail} [{:.2}s, budget {}s]",
            if passed { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
