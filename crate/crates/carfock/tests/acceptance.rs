//! Acceptance gate: one test per release criterion, each printing a
//! PASS/FAIL line (visible under --nocapture) and asserting the result.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use carfock::channels::{
    erasure_ppt_spectrum, erasure_quantum_capacity, grassmann_output_state, AccelerationParam,
    ErasureParams,
};
use carfock::density::{partial_transpose_second, spectrum_of, DensityMatrix};
use carfock::entanglement::{binary_entropy, eof_wootters};
use carfock::roof::{eof_convex_roof, RoofConfig, RoofConstraint};
use carfock::{BasisState, FockVector, ModeOrder};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gate(number: usize, name: &str, detail: Option<String>) {
    let pass = detail.is_none();
    println!(
        "[acceptance] criterion {number} ({name}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    if let Some(detail) = detail {
        panic!("criterion {number} ({name}) failed: {detail}");
    }
}

fn order(labels: &str) -> ModeOrder {
    ModeOrder::new(labels.split_whitespace()).unwrap()
}

/// The three-mode superposition whose reduction is computed two ways.
fn phi() -> FockVector {
    FockVector::from_terms(
        order("a b c"),
        ["100", "010", "101", "011"]
            .iter()
            .map(|bits| (BasisState::from_bit_str(bits).unwrap(), c(0.5, 0.0))),
    )
    .unwrap()
}

fn erasure(p: f64) -> ErasureParams {
    ErasureParams::new(p).unwrap()
}

fn accel(r: f64) -> AccelerationParam {
    AccelerationParam::new(r).unwrap()
}

fn choi_negativity(p: f64) -> f64 {
    let choi = carfock::channels::erasure_choi(erasure(p));
    let pt = partial_transpose_second(&choi, 2, 3).unwrap();
    spectrum_of(&pt).unwrap().negative_weight()
}

#[test]
fn criterion_1_ppt_spectrum_closed_form() {
    let start = Instant::now();
    let mut detail = None;
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let got = erasure_ppt_spectrum(erasure(p));
        let mut expect = vec![
            (p - 1.0) / 2.0,
            (1.0 - p) / 2.0,
            (1.0 - p) / 2.0,
            (1.0 - p) / 2.0,
            p / 2.0,
            p / 2.0,
        ];
        expect.sort_by(|a, b| b.total_cmp(a));
        let worst = got
            .eigenvalues()
            .iter()
            .zip(&expect)
            .map(|(g, e)| (g - e).abs())
            .fold(0.0, f64::max);
        if worst > 1e-12 {
            detail = Some(format!("p={p}: eigenvalue deviation {worst:e}"));
            break;
        }
    }
    let elapsed = start.elapsed();
    if detail.is_none() && elapsed.as_secs_f64() >= 1.0 {
        detail = Some(format!("runtime {elapsed:?} exceeds 1 s"));
    }
    gate(1, "erasure PPT spectrum", detail);
}

#[test]
fn criterion_2_reduction_two_routes() {
    let phi = phi();
    let direct = DensityMatrix::outer(&phi)
        .unwrap()
        .partial_trace(["c"])
        .unwrap();

    let mut expect = DMatrix::zeros(4, 4);
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        expect[(i, j)] = c(0.5, 0.0);
    }
    let dev_direct = (direct.matrix() - &expect)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let rerouted = DensityMatrix::outer(&phi.reorder_modes(&order("a c b")).unwrap())
        .unwrap()
        .partial_trace(["c"])
        .unwrap();
    let dev_routes = (direct.matrix() - rerouted.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let mut detail = None;
    if dev_direct > 1e-14 {
        detail = Some(format!("reduction deviates from the worked matrix by {dev_direct:e}"));
    } else if dev_routes > 1e-14 {
        detail = Some(format!("routes disagree by {dev_routes:e}"));
    } else if direct.order().labels() != rerouted.order().labels() {
        detail = Some("routes disagree on the surviving mode order".into());
    }
    gate(2, "worked reduction, both routes", detail);
}

#[test]
fn criterion_3_trace_reorder_commutation_randomized() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut detail = None;

    for trial in 0..1000 {
        let n = rng.random_range(3..=6usize);
        let labels: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
        let ord = ModeOrder::new(labels.clone()).unwrap();

        let dim = 1usize << n;
        let terms: Vec<(BasisState, Complex64)> = (0..dim)
            .map(|code| {
                (
                    BasisState::new(code, n),
                    c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                )
            })
            .collect();
        let state = FockVector::from_terms(ord.clone(), terms)
            .unwrap()
            .normalized()
            .unwrap();

        let mut shuffled = labels.clone();
        for i in (1..n).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let perm = ModeOrder::new(shuffled).unwrap();
        let traced = labels[rng.random_range(0..n)].clone();

        let rho_a = DensityMatrix::outer(&state)
            .unwrap()
            .partial_trace([traced.as_str()])
            .unwrap();
        let rho_b = DensityMatrix::outer(&state.reorder_modes(&perm).unwrap())
            .unwrap()
            .partial_trace([traced.as_str()])
            .unwrap()
            .reorder_modes(rho_a.order())
            .unwrap();

        let dev = (rho_a.matrix() - rho_b.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > 1e-12 {
            detail = Some(format!("trial {trial}: routes disagree by {dev:e}"));
            break;
        }
    }

    let elapsed = start.elapsed();
    if detail.is_none() && elapsed.as_secs_f64() >= 30.0 {
        detail = Some(format!("runtime {elapsed:?} exceeds 30 s"));
    }
    gate(3, "randomized trace/reorder commutation", detail);
}

#[test]
fn criterion_4_braided_norm() {
    let phi = phi();

    // the one-particle kets keep their sign, the two-particle kets flip
    let expected_signs = [("100", 1.0), ("010", 1.0), ("101", -1.0), ("011", -1.0)];
    let adjoint = phi.braided_adjoint_signs();
    let sign_of = |bits: &str| {
        let bs = BasisState::from_bit_str(bits).unwrap();
        let (_, amp) = adjoint.iter().find(|(k, _)| *k == bs).unwrap();
        (amp.re / phi.amplitude(bs).re).signum()
    };
    let norm = phi.inner_product(&phi).unwrap();

    let mut detail = None;
    if let Some((bits, want)) = expected_signs.iter().find(|(bits, want)| sign_of(bits) != *want) {
        detail = Some(format!("adjoint sign of |{bits}> is {}, expected {want}", sign_of(bits)));
    } else if (norm - c(1.0, 0.0)).norm() > 1e-14 {
        detail = Some(format!("norm {norm} deviates from 1"));
    }
    gate(4, "braided adjoint norm", detail);
}

#[test]
fn criterion_5_ssr_gate() {
    let mut detail = None;

    let psi = FockVector::from_terms(
        order("a b"),
        ["00", "01", "10", "11"]
            .iter()
            .map(|bits| (BasisState::from_bit_str(bits).unwrap(), c(0.5, 0.0))),
    )
    .unwrap();
    let omega_pair = FockVector::from_terms(
        order("a b"),
        [
            (BasisState::from_bit_str("00").unwrap(), c(1.0 / 2f64.sqrt(), 0.0)),
            (BasisState::from_bit_str("11").unwrap(), c(1.0 / 2f64.sqrt(), 0.0)),
        ],
    )
    .unwrap();
    let omega_dirac = FockVector::from_terms(
        order("a_up a_dn b_up b_dn"),
        [
            (BasisState::from_bit_str("1001").unwrap(), c(1.0 / 2f64.sqrt(), 0.0)),
            (BasisState::from_bit_str("0110").unwrap(), c(1.0 / 2f64.sqrt(), 0.0)),
        ],
    )
    .unwrap();

    if phi().ssr_check().is_valid() {
        detail = Some("mixed-parity three-mode state was accepted".into());
    } else if psi.ssr_check().is_valid() {
        detail = Some("mixed-parity two-mode state was accepted".into());
    } else if !omega_pair.ssr_check().is_valid() {
        detail = Some("even-sector pair state was rejected".into());
    } else if !omega_dirac.ssr_check().is_valid() {
        detail = Some("even-sector four-mode state was rejected".into());
    } else {
        for k in 0..=24 {
            let r = AccelerationParam::MAX * k as f64 / 24.0;
            if !grassmann_output_state(accel(r)).ssr_check().is_valid() {
                detail = Some(format!("acceleration output rejected at r={r}"));
                break;
            }
        }
    }
    gate(5, "superselection gate", detail);
}

#[test]
fn criterion_6_roof_matches_wootters_on_random_states() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x50F);
    let ord = order("a b");
    let config = RoofConfig::default();
    let mut detail = None;

    for trial in 0..50 {
        let g = DMatrix::from_fn(4, 4, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let mut m = &g * g.adjoint();
        let tr = carfock::density::mat_trace(&m).re;
        m /= c(tr, 0.0);
        let rho = DensityMatrix::new(ord.clone(), m).unwrap();

        let oracle = eof_wootters(&rho).unwrap();
        let (report, _) = eof_convex_roof(&rho, RoofConstraint::Unconstrained, &config).unwrap();
        if (report.value - oracle).abs() > 1e-3 {
            detail = Some(format!(
                "trial {trial}: roof {} vs closed form {oracle} (diff {:e})",
                report.value,
                (report.value - oracle).abs()
            ));
            break;
        }
    }

    let elapsed = start.elapsed();
    if detail.is_none() && elapsed.as_secs_f64() >= 300.0 {
        detail = Some(format!("runtime {elapsed:?} exceeds 5 min"));
    }
    gate(6, "roof vs closed-form oracle", detail);
}

#[test]
fn criterion_7_acceleration_curve_properties() {
    let config = RoofConfig::default();
    let mut detail = None;
    let mut previous_gap = f64::NEG_INFINITY;
    let mut last_gap = 0.0;

    for k in 0..25 {
        let r = AccelerationParam::MAX * k as f64 / 24.0;
        let rho = grassmann_output_state(accel(r));
        let wootters = eof_wootters(&rho).unwrap();
        let closed_form = binary_entropy((1.0 + r.sin()) / 2.0);
        let (ssr, _) = eof_convex_roof(&rho, RoofConstraint::ParitySsr, &config).unwrap();
        let gap = ssr.value - wootters;

        if (wootters - closed_form).abs() > 1e-12 {
            detail = Some(format!(
                "(a) r={r}: closed form deviates by {:e}",
                (wootters - closed_form).abs()
            ));
            break;
        }
        if ssr.value < wootters - 1e-6 {
            detail = Some(format!("(b) r={r}: constrained value below unconstrained"));
            break;
        }
        if k == 0 && ((wootters - 1.0).abs() > 1e-6 || (ssr.value - 1.0).abs() > 1e-6) {
            detail = Some(format!("(c) r=0: values {wootters}, {}", ssr.value));
            break;
        }
        if gap < previous_gap - 1e-3 {
            detail = Some(format!("(d) r={r}: gap decreased {previous_gap} -> {gap}"));
            break;
        }
        previous_gap = previous_gap.max(gap);
        last_gap = gap;
    }
    if detail.is_none() && last_gap <= 0.0 {
        detail = Some(format!("(d) gap at the endpoint is {last_gap}, not positive"));
    }
    gate(7, "accelerated-observer curve", detail);
}

#[test]
fn criterion_8_capacity_negativity_witness() {
    let mut detail = None;

    let capacity = erasure_quantum_capacity(erasure(0.5));
    let negativity_half = choi_negativity(0.5);
    if capacity != 0.0 {
        detail = Some(format!("capacity at p=0.5 is {capacity}, not 0"));
    } else if (negativity_half - 0.25).abs() > 1e-12 {
        detail = Some(format!("negativity at p=0.5 is {negativity_half}"));
    } else {
        for k in 0..100 {
            let p = k as f64 / 100.0;
            if choi_negativity(p) <= 0.0 {
                detail = Some(format!("negativity vanished at p={p} < 1"));
                break;
            }
        }
        if detail.is_none() && choi_negativity(0.999) <= 0.0 {
            detail = Some("negativity vanished at p=0.999".into());
        }
        if detail.is_none() && choi_negativity(1.0) > 1e-12 {
            detail = Some(format!("negativity at p=1 is {}", choi_negativity(1.0)));
        }
    }
    gate(8, "capacity/negativity witness", detail);
}

#[test]
fn criterion_9_car_identities_exhaustive() {
    let start = Instant::now();
    let mut detail = 'outer: {
        for n in 1..=4usize {
            let labels: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
            let ord = ModeOrder::new(labels.clone()).unwrap();
            for code in 0..(1usize << n) {
                let ket = FockVector::basis(ord.clone(), BasisState::new(code, n)).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let li = labels[i].as_str();
                        let lj = labels[j].as_str();

                        // {a_i, a_j} = 0
                        let anti_aa = ket
                            .apply_annihilation(li)
                            .unwrap()
                            .apply_annihilation(lj)
                            .unwrap()
                            .add(
                                &ket.apply_annihilation(lj)
                                    .unwrap()
                                    .apply_annihilation(li)
                                    .unwrap(),
                            )
                            .unwrap();
                        if !anti_aa.is_zero() {
                            break 'outer Some(format!(
                                "{{a_{li}, a_{lj}}} != 0 on |{code:0n$b}>"
                            ));
                        }

                        // {a_i^+, a_j^+} = 0
                        let anti_cc = ket
                            .apply_creation(li)
                            .unwrap()
                            .apply_creation(lj)
                            .unwrap()
                            .add(&ket.apply_creation(lj).unwrap().apply_creation(li).unwrap())
                            .unwrap();
                        if !anti_cc.is_zero() {
                            break 'outer Some(format!(
                                "{{a+_{li}, a+_{lj}}} != 0 on |{code:0n$b}>"
                            ));
                        }

                        // {a_i, a_j^+} = delta_ij
                        let anti_ac = ket
                            .apply_creation(lj)
                            .unwrap()
                            .apply_annihilation(li)
                            .unwrap()
                            .add(&ket.apply_annihilation(li).unwrap().apply_creation(lj).unwrap())
                            .unwrap();
                        let expect = if i == j { ket.clone() } else { FockVector::zero(ord.clone()) };
                        let bs = BasisState::new(code, n);
                        let same = anti_ac.num_terms() == expect.num_terms()
                            && anti_ac.amplitude(bs) == expect.amplitude(bs);
                        if !same {
                            break 'outer Some(format!(
                                "{{a_{li}, a+_{lj}}} wrong on |{code:0n$b}>"
                            ));
                        }
                    }
                }
            }
        }
        None
    };

    let elapsed = start.elapsed();
    if detail.is_none() && elapsed.as_secs_f64() >= 1.0 {
        detail = Some(format!("runtime {elapsed:?} exceeds 1 s"));
    }
    gate(9, "exhaustive anticommutators", detail);
}
