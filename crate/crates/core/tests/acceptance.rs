//! Acceptance suite: one PASS/FAIL line per criterion with the measured
//! values and the bound each was held to.  Oracles are computed here,
//! independently of the library code under test.  Exits non-zero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twoprover::circuits::{compile, Circuit, CompiledCircuit, Parity};
use twoprover::dogwalker::{cz_histogram, tv_from_uniform, DwParams};
use twoprover::epr::{leash_vs_epr_gadget_fidelity, test_gadget_fidelity, RoundChoice};
use twoprover::games::{CliffordAction, GameConfig, GameKind};
use twoprover::keys::RoundType;
use twoprover::leash::{self, sample_w, LeashParams, Partition};
use twoprover::orchestrator::audit::blindness_audit;
use twoprover::orchestrator::corpus::{corpus, hth, Entry};
use twoprover::orchestrator::experiment::{dw_trial, epr_trial, leash_trial, run_game, ExperimentSetup, Params, Protocol};
use twoprover::orchestrator::seq::run_seq_experiment;
use twoprover::orchestrator::strategy::{PpMode, PvMode};
use twoprover::qsim::{Label, StateVector};

type M = Vec<Vec<C>>;

// ---------------------------------------------------------------------------
// dense linear algebra for the matrix oracle

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn mat(rows: [[C; 2]; 2]) -> M {
    rows.iter().map(|r| r.to_vec()).collect()
}

fn mul(a: &M, b: &M) -> M {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn dag(a: &M) -> M {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

fn scale(a: &M, s: C) -> M {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

fn add(a: &M, b: &M) -> M {
    a.iter().zip(b).map(|(r, q)| r.iter().zip(q).map(|(x, y)| x + y).collect()).collect()
}

fn kron(a: &M, b: &M) -> M {
    let (n, k) = (a.len(), b.len());
    (0..n * k).map(|i| (0..n * k).map(|j| a[i / k][j / k] * b[i % k][j % k]).collect()).collect()
}

fn max_diff(a: &M, b: &M) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn eye(n: usize) -> M {
    (0..n).map(|i| (0..n).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

fn i_pow(k: u8) -> C {
    [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][k as usize % 4]
}

struct Raw {
    x: M,
    y: M,
    z: M,
}

fn raw() -> Raw {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    Raw { x: mat([[o, l], [l, o]]), y: mat([[o, -i], [i, o]]), z: mat([[l, o], [o, -l]]) }
}

/// The single-qubit observables from their textbook definitions.
fn reference(l: Label) -> M {
    let r = raw();
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match l {
        Label::I => eye(2),
        Label::X => r.x,
        Label::Y => r.y,
        Label::Z => r.z,
        Label::H => scale(&add(&r.x, &r.z), s),
        Label::Hp => scale(&add(&r.x, &scale(&r.z, c(-1.0, 0.0))), s),
        Label::F => scale(&add(&scale(&r.x, c(-1.0, 0.0)), &r.y), s),
        Label::G => scale(&add(&r.x, &r.y), s),
    }
}

fn pauli_xz(a: u8, b: u8) -> M {
    let r = raw();
    let x = if a == 1 { r.x } else { eye(2) };
    let z = if b == 1 { r.z } else { eye(2) };
    mul(&x, &z)
}

/// i^k X^x Z^z matching a 2x2 matrix, found by exhaustive search.
fn decompose(m: &M) -> Option<(u8, u8, u8)> {
    for k in 0..4u8 {
        for x in 0..2u8 {
            for z in 0..2u8 {
                if max_diff(&scale(&pauli_xz(x, z), i_pow(k)), m) < 1e-12 {
                    return Some((k, x, z));
                }
            }
        }
    }
    None
}

const ALL_LABELS: [Label; 8] = [Label::I, Label::X, Label::Y, Label::Z, Label::F, Label::G, Label::H, Label::Hp];

fn c1_identities() -> (bool, String) {
    let neg = |m: &M| scale(m, c(-1.0, 0.0));
    let conjm = |m: &M| -> M { m.iter().map(|r| r.iter().map(|x| x.conj()).collect()).collect() };
    let s = |l| reference(l);
    let mut worst: f64 = 0.0;
    // library matrices against the definitions
    for l in ALL_LABELS {
        worst = worst.max(max_diff(&mat(l.matrix()), &s(l)));
        // Hermitian involutions
        worst = worst.max(max_diff(&s(l), &dag(&s(l))));
        worst = worst.max(max_diff(&mul(&s(l), &s(l)), &eye(2)));
    }
    let (x, y, z) = (s(Label::X), s(Label::Y), s(Label::Z));
    let conj3 = |u: &M, a: &M| mul(&mul(u, a), u);
    let identities = [
        (conj3(&x, &s(Label::H)), s(Label::Hp)),
        (conj3(&z, &s(Label::H)), neg(&s(Label::Hp))),
        (conj3(&x, &s(Label::F)), neg(&s(Label::G))),
        (conj3(&y, &s(Label::F)), s(Label::G)),
        // complex conjugates: the second representation
        (conjm(&y), neg(&y)),
        (conjm(&s(Label::F)), neg(&s(Label::G))),
        (conjm(&s(Label::G)), neg(&s(Label::F))),
    ];
    for (lhs, rhs) in &identities {
        worst = worst.max(max_diff(lhs, rhs));
    }
    // CliffordAction against 2x2 conjugation, every label and (a, b)
    let mut mismatches = 0;
    for l in ALL_LABELS {
        for (a, b) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            let (hs, hx, hz) = CliffordAction::new(vec![l]).conjugate_pauli(&[a], &[b]);
            let lhs = mul(&mul(&s(l), &pauli_xz(a, b)), &dag(&s(l)));
            let rhs = scale(&pauli_xz(hx[0], hz[0]), i_pow(hs));
            let d = max_diff(&lhs, &rhs);
            worst = worst.max(d);
            mismatches += (d > 1e-12) as usize;
        }
    }
    // random instances, m <= 6: per-qubit oracle for every instance, full
    // tensor-product conjugation when m <= 3
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut dense_checked, mut parity_bad, mut literal_bad) = (0, 0, 0);
    for _ in 0..1000 {
        let m = rng.gen_range(1..=6);
        let labels: Vec<Label> = (0..m).map(|_| ALL_LABELS[rng.gen_range(0..8)]).collect();
        let a: Vec<u8> = (0..m).map(|_| rng.gen_range(0..2)).collect();
        let b: Vec<u8> = (0..m).map(|_| rng.gen_range(0..2)).collect();
        let (hs, hx, hz) = CliffordAction::new(labels.clone()).conjugate_pauli(&a, &b);
        let mut k = 0u8;
        for i in 0..m {
            let l = s(labels[i]);
            let img = mul(&mul(&l, &pauli_xz(a[i], b[i])), &dag(&l));
            match decompose(&img) {
                Some((ki, xi, zi)) if xi == hx[i] && zi == hz[i] => k = (k + ki) % 4,
                _ => mismatches += 1,
            }
        }
        mismatches += (k != hs) as usize;
        if m <= 3 {
            let kr = |f: &dyn Fn(usize) -> M| (1..m).fold(f(0), |acc, i| kron(&acc, &f(i)));
            let r = kr(&|i| s(labels[i]));
            let lhs = mul(&mul(&r, &kr(&|i| pauli_xz(a[i], b[i]))), &dag(&r));
            let rhs = scale(&kr(&|i| pauli_xz(hx[i], hz[i])), i_pow(hs));
            let d = max_diff(&lhs, &rhs);
            worst = worst.max(d);
            mismatches += (d > 1e-12) as usize;
            dense_checked += 1;
        }
        let dot = |u: &[u8], v: &[u8]| u.iter().zip(v).map(|(p, q)| p & q).sum::<u8>() % 2;
        // Hermiticity of both sides: h_X.h_Z = a.b + h_S (h_S the power of i)
        parity_bad += (dot(&hx, &hz) != (dot(&a, &b) + hs) % 2) as usize;
        literal_bad += (dot(&hx, &hz) != dot(&a, &b)) as usize;
    }
    let pass = worst <= 1e-12 && mismatches == 0 && parity_bad == 0;
    (
        pass,
        format!(
            "max deviation {worst:.1e} (tol 1e-12), {mismatches} action mismatches, {dense_checked} dense checks; h_X.h_Z = a.b + h_S failed {parity_bad}/1000 (uncorrected a.b form fails {literal_bad}/1000)"
        ),
    )
}

// ---------------------------------------------------------------------------

fn c2_epr_completeness() -> (bool, String) {
    let mut rejections = 0;
    let mut worst: (f64, &str) = (0.0, "");
    for (k, e) in corpus().iter().enumerate() {
        let circ = e.compiled();
        for i in 0..1000 {
            rejections += !epr_trial(&circ, &e.input, RoundChoice::Random { p: 0.0 }, PpMode::Honest, 200 + k as u64, i).accept as u64;
        }
        let acc = (0..2000).filter(|&i| epr_trial(&circ, &e.input, RoundChoice::Fixed(RoundType::Computation), PpMode::Honest, 300 + k as u64, i).accept).count();
        let dev = (acc as f64 / 2000.0 - e.oracle()).abs();
        if dev >= worst.0 {
            worst = (dev, e.name);
        }
    }
    (
        rejections == 0 && worst.0 <= 0.05,
        format!("test rounds: {rejections} rejections / 10000; computation: max |rate - oracle| = {:.4} ({}) (tol 0.05)", worst.0, worst.1),
    )
}

fn tv2(p: f64, q: f64) -> f64 {
    (p - q).abs()
}

fn c3_decoded_outputs() -> (bool, String) {
    let n = 2000;
    let lp = LeashParams { p_r: 0.0, rounds: RoundChoice::Fixed(RoundType::Computation), ..Default::default() };
    let (mut worst_epr, mut worst_leash, mut worst_exact): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut leash_trials = 0;
    for (k, e) in corpus().iter().enumerate() {
        let circ = e.compiled();
        // direct measurement of the output wire of Q|x>
        let state = e.circuit().simulate(&e.input).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(400 + k as u64);
        let direct = (0..n).filter(|_| state.clone().measure_label(0, Label::Z, &mut rng) == 0).count() as f64 / n as f64;
        let epr = (0..n).filter(|&i| epr_trial(&circ, &e.input, RoundChoice::Fixed(RoundType::Computation), PpMode::Honest, 500 + k as u64, i).output == Some(0)).count() as f64 / n as f64;
        worst_epr = worst_epr.max(tv2(epr, direct));
        worst_exact = worst_exact.max(tv2(epr, e.oracle()));
        let lt = 2000;
        let leash = (0..lt).filter(|&i| leash_trial(&circ, &e.input, &lp, PvMode::Honest, PpMode::Honest, 600 + k as u64, i).output == Some(0)).count() as f64 / lt as f64;
        leash_trials += lt;
        worst_leash = worst_leash.max(tv2(leash, e.oracle()));
    }
    (
        worst_epr <= 0.05 && worst_exact <= 0.05 && worst_leash <= 0.05,
        format!(
            "EPR decoded vs direct measurement: max TV {worst_epr:.4}, vs exact {worst_exact:.4} (tol 0.05); leash decoded vs exact: max TV {worst_leash:.4} over {leash_trials} runs (tol 0.05)"
        ),
    )
}

fn random_qubit(rng: &mut ChaCha8Rng) -> StateVector {
    let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    StateVector::from_amplitudes(vec![c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n)]).unwrap()
}

fn c4_gadgets() -> (bool, String) {
    let mut worst_test: f64 = 1.0;
    for round in [RoundType::XTest, RoundType::ZTest] {
        for parity in [Parity::Even, Parity::Odd] {
            for k in 0..8u8 {
                worst_test = worst_test.min(test_gadget_fidelity(round, parity, k & 1, (k >> 1) & 1, k >> 2));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst_leash: f64 = 1.0;
    let mut cases = 0;
    for _ in 0..100 {
        let data = random_qubit(&mut rng);
        for round in RoundType::ALL {
            for parity in [Parity::Even, Parity::Odd] {
                for a in 0..2u8 {
                    worst_leash = worst_leash.min(leash_vs_epr_gadget_fidelity(round, parity, &data, a));
                    cases += 1;
                }
            }
        }
    }
    (
        worst_test >= 1.0 - 1e-9 && worst_leash >= 1.0 - 1e-9,
        format!("test-round gadget min fidelity {worst_test:.12}; leash vs EPR gadget min fidelity {worst_leash:.12} over {cases} random cases (tol 1e-9)"),
    )
}

// ---------------------------------------------------------------------------

fn binom_pmf(n: usize, k: usize, p: f64) -> f64 {
    let mut ln = 0.0;
    for i in 0..k {
        ln += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    (ln + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

/// Honest pass probability of the CHSH part on m pairs: |T| ~ Bin(m, 4/25)
/// (W in {X,Y} and W' in {F,G}), each position in T won w.p. cos^2(pi/8),
/// and the round passes when the won fraction reaches cos^2(pi/8) - 0.1.
fn chsh_pass(m: usize) -> f64 {
    let w = (std::f64::consts::PI / 8.0).cos().powi(2);
    let thr = w - 0.1;
    (0..=m)
        .map(|t| {
            let pass: f64 = if t == 0 { 1.0 } else { (0..=t).filter(|&g| g as f64 >= thr * t as f64).map(|g| binom_pmf(t, g, w)).sum() };
            binom_pmf(m, t, 4.0 / 25.0) * pass
        })
        .sum()
}

/// RIGID honest success: consistency rounds (1/2) and Clifford rounds
/// (1/4) always win; the CHSH part (1/4) passes with chsh_pass(m).
fn rigid_bound(m: usize) -> f64 {
    0.75 + 0.25 * chsh_pass(m)
}

fn c5_games() -> (bool, String) {
    let cfg = GameConfig::default();
    let mut losses = BTreeMap::new();
    for kind in GameKind::ALL.into_iter().filter(|k| *k != GameKind::Rigid) {
        let st = run_game(kind, &cfg, PvMode::Honest, PpMode::Honest, 10_000, 700 + kind as u64);
        losses.insert(kind.name(), st.trials - st.accepted);
    }
    let total: u64 = losses.values().sum();
    let rcfg = GameConfig { m: 64, m_prime: 1, window: cfg.window };
    let rigid = run_game(GameKind::Rigid, &rcfg, PvMode::Honest, PpMode::Honest, 500, 799);
    let bound = rigid_bound(64);
    let pass = total == 0 && rigid.rate >= bound - 0.02 && rigid.rate >= 0.9;
    let names: Vec<&str> = losses.keys().copied().collect();
    (
        pass,
        format!(
            "{} games x 10^4: {total} losses ({}); RIGID(m=64) {:.4} over 500 vs bound {bound:.4} - 0.02 and 0.9",
            names.len(),
            names.join(","),
            rigid.rate
        ),
    )
}

// ---------------------------------------------------------------------------

/// RIGID completeness measured by the standalone game at the protocol's m.
fn measured_rigid(m: usize, trials: u64, master: u64) -> f64 {
    run_game(GameKind::Rigid, &GameConfig { m, m_prime: 1, window: 5 }, PvMode::Honest, PpMode::Honest, trials, master).rate
}

fn leash_rate(e: &Entry, params: &LeashParams, pv: PvMode, pp: PpMode, trials: u64, master: u64) -> f64 {
    let circ = e.compiled();
    (0..trials).filter(|&i| leash_trial(&circ, &e.input, params, pv, pp, master, i).accept).count() as f64 / trials as f64
}

fn c6_leash() -> (bool, String) {
    let params = LeashParams::default();
    let p_d = 1.0 - params.p_r;
    let mut pass = true;
    let mut parts = vec![];
    for (k, e) in [corpus().into_iter().find(|e| e.name == "hh").unwrap(), hth()].iter().enumerate() {
        let m = leash::effective_m(&e.compiled(), &params);
        let rho = measured_rigid(m, 2000, 810 + k as u64);
        let rate = leash_rate(e, &params, PvMode::Honest, PpMode::Honest, 2000, 820 + k as u64);
        let bound = params.p_r * rho + p_d * 8.0 / 9.0 - 0.03;
        pass &= rate >= bound && e.oracle() >= 2.0 / 3.0;
        parts.push(format!("{} (p={:.3}, m={m}): {rate:.4} >= {bound:.4} [rho={rho:.4}]", e.name, e.oracle()));
    }
    (pass, parts.join("; "))
}

fn c7_dogwalker() -> (bool, String) {
    let e = hth();
    let circ = e.compiled();
    let params = DwParams::default();
    let m = twoprover::dogwalker::effective_m(&circ, &params);
    let delta_c = 1.0 - measured_rigid(m, 2000, 830);
    let p = e.oracle();
    let want = params.p1 * (1.0 - delta_c) + params.p2 + p * params.p3 + params.p4;
    let rate = (0..2000).filter(|&i| dw_trial(&circ, &e.input, &params, PvMode::Honest, PpMode::Honest, 831, i).accept).count() as f64 / 2000.0;
    (
        (rate - want).abs() <= 0.03,
        format!("{} (p={p:.3}, m={m}): {rate:.4} vs p1(1-dc)+p2+p*p3+p4 = {want:.4} [dc={delta_c:.4}] (tol 0.03)", e.name),
    )
}

// ---------------------------------------------------------------------------

fn c8_adversaries() -> (bool, String) {
    // flipped output bit, X-test rounds across the corpus
    let mut flip_accepted = 0;
    for (k, e) in corpus().iter().enumerate() {
        let circ = e.compiled();
        flip_accepted += (0..1000).filter(|&i| epr_trial(&circ, &e.input, RoundChoice::Fixed(RoundType::XTest), PpMode::FlipCf, 900 + k as u64, i).accept).count();
    }
    // random gadget bits, test rounds: a checked gadget survives w.p. 1/2
    let e = corpus().into_iter().find(|e| e.name == "t_cnot_h").unwrap();
    let circ = e.compiled();
    let (even, odd) = (circ.parity_count(Parity::Even), circ.parity_count(Parity::Odd));
    let want = 1.0 - 0.5 * (0.5f64.powi(even as i32) + 0.5f64.powi(odd as i32));
    let n = 4000;
    let rejected = (0..n).filter(|&i| !epr_trial(&circ, &e.input, RoundChoice::Random { p: 0.0 }, PpMode::RandomC, 910, i).accept).count() as f64 / n as f64;
    // the complex-conjugate strategy on both provers, same seeds
    let h = hth();
    let lp = LeashParams::default();
    let hc = h.compiled();
    let (mut honest, mut conj, mut differ) = (0.0, 0.0, 0);
    for i in 0..2000 {
        let a = leash_trial(&hc, &h.input, &lp, PvMode::Honest, PpMode::Honest, 920, i);
        let b = leash_trial(&hc, &h.input, &lp, PvMode::Conjugate, PpMode::Conjugate, 920, i);
        honest += a.accept as u8 as f64 / 2000.0;
        conj += b.accept as u8 as f64 / 2000.0;
        differ += (a.transcript != b.transcript) as usize;
    }
    let pass = flip_accepted == 0 && (rejected - want).abs() <= 0.04 && (honest - conj).abs() <= 0.03;
    (
        pass,
        format!(
            "pp_flip_cf accepted {flip_accepted}/10000 X-tests; pp_random_c rejection {rejected:.4} vs {want:.4} (#even={even}, #odd={odd}, tol 0.04); pv_conjugate {conj:.4} vs honest {honest:.4} (tol 0.03; {differ}/2000 transcripts differ)"
        ),
    )
}

fn c9_blindness() -> (bool, String) {
    // the question sampler admits no input argument
    let _: fn(&CompiledCircuit, usize, &mut ChaCha8Rng) -> (Vec<Label>, Partition) = sample_w::<ChaCha8Rng>;
    let e = corpus().into_iter().find(|e| e.name == "t_cnot_h").unwrap();
    let r = blindness_audit(&e.compiled(), &LeashParams::default(), 5000, 940);
    let worst = r.tv.iter().max_by(|a, b| a.1.total_cmp(b.1)).map(|(k, v)| format!("{k}={v:.4}")).unwrap_or_default();
    (
        r.max_pv <= 0.05 && r.max_pp <= 0.05,
        format!("{} x 5000: max TV PV {:.4}, PP {:.4} over {} features (largest {worst}) (tol 0.05); sampler x-free by signature", e.name, r.max_pv, r.max_pp, r.tv.len()),
    )
}

fn c10_seq() -> (bool, String) {
    let mut pass = true;
    let mut parts = vec![];
    for (x, want) in [(0u8, 1u8), (1, 0)] {
        let setup = ExperimentSetup {
            protocol: Protocol::Seq,
            circuit: Circuit::parse("T 1").unwrap(),
            input: vec![x],
            params: Params::default(),
            pv: PvMode::Honest,
            pp: PpMode::Honest,
        };
        let r = run_seq_experiment(&setup, 100, 950 + x as u64).unwrap();
        let bound = 2.0 * (-r.delta * r.delta * r.kappa as f64 / 2.0).exp();
        let correct = if want == 1 { r.one } else { r.zero };
        let ok = r.expected == Some(want) && bound <= 0.05 && correct >= 90 && r.abort <= 10;
        pass &= ok;
        parts.push(format!(
            "x={x} (f={want}): c={:.4} delta={:.4} kappa={} (2exp(-d^2k/2)={bound:.3}) -> correct {correct}/100, abort {}",
            r.c, r.delta, r.kappa, r.abort
        ));
    }
    (pass, parts.join("; "))
}

fn c11_uniformity() -> (bool, String) {
    let circ = compile(&Circuit::parse("T 1\nT 1").unwrap()).unwrap();
    let params = DwParams { p1: 0.0, p2: 0.9, p3: 0.1, p4: 0.0, ..Default::default() };
    let run = |pp: PpMode| {
        let rs: Vec<_> = (0..5000).map(|i| dw_trial(&circ, &[0], &params, PvMode::Honest, pp, 960, i)).collect();
        tv_from_uniform(&cz_histogram(&rs), circ.t())
    };
    let (honest, zero) = (run(PpMode::Honest), run(PpMode::ZeroC));
    (
        honest <= 0.05 && (zero - 0.75).abs() <= 0.03,
        format!("t={} x 5000: honest TV {honest:.4} (tol 0.05); control pp_zero_c TV {zero:.4} (exact 0.75)", circ.t()),
    )
}

fn c12_determinism() -> (bool, String) {
    let bin = env!("CARGO_BIN_EXE_twoprover");
    let corpus_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let dir = std::env::temp_dir().join(format!("twoprover-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let t_single = corpus_dir.join("t_single.qc").display().to_string();
    let bell = corpus_dir.join("bell.qc").display().to_string();
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("epr", vec!["--protocol".into(), "epr".into(), "--circuit".into(), bell.clone(), "--trials".into(), "200".into()]),
        ("leash", vec!["--protocol".into(), "leash".into(), "--circuit".into(), bell.clone(), "--trials".into(), "100".into()]),
        ("dogwalker", vec!["--protocol".into(), "dogwalker".into(), "--circuit".into(), bell, "--trials".into(), "100".into()]),
        (
            "seq",
            vec!["--protocol".into(), "seq".into(), "--circuit".into(), t_single, "--trials".into(), "2".into(), "--params".into(), "c=0.9,delta=0.3,kappa=20".into()],
        ),
        ("game", vec!["--game".into(), "rigid".into(), "--trials".into(), "200".into()]),
    ];
    let mut identical = 0;
    let mut differs_by_seed = 0;
    let mut failures = vec![];
    for (name, args) in &runs {
        let mut outs = vec![];
        for (rep, seed) in [(0, "7"), (1, "7"), (2, "8")] {
            let path = dir.join(format!("{name}-{rep}.json"));
            let st = Command::new(bin).args(args).args(["--seed", seed, "--json"]).arg(&path).output().unwrap();
            if !st.status.success() {
                failures.push(format!("{name}: exit {:?}", st.status.code()));
            }
            outs.push(std::fs::read(&path).unwrap_or_default());
        }
        if !outs[0].is_empty() && outs[0] == outs[1] {
            identical += 1;
        }
        differs_by_seed += (outs[0] != outs[2]) as usize;
    }
    let bad = Command::new(bin).args(["--protocol", "nope"]).output().unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    (
        identical == runs.len() && failures.is_empty() && !bad.status.success(),
        format!(
            "{identical}/{} invocations byte-identical under a repeated seed ({differs_by_seed} change with the seed); config error exits {:?}{}",
            runs.len(),
            bad.status.code(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join(", ")) }
        ),
    )
}

fn main() {
    type Check = fn() -> (bool, String);
    let checks: [(&str, Check, Option<f64>); 12] = [
        ("matrix and identity suite", c1_identities, Some(1.0)),
        ("EPR completeness", c2_epr_completeness, Some(120.0)),
        ("key-tracker oracle equivalence", c3_decoded_outputs, None),
        ("gadget identities", c4_gadgets, None),
        ("game completeness", c5_games, Some(300.0)),
        ("leash completeness", c6_leash, None),
        ("Dog-Walker completeness", c7_dogwalker, None),
        ("adversary detection", c8_adversaries, None),
        ("blindness audit", c9_blindness, None),
        ("sequential wrapper", c10_seq, None),
        ("Dog-Walker uniformity", c11_uniformity, None),
        ("CLI determinism", c12_determinism, None),
    ];
    let only: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (i, (name, f, limit)) in checks.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let t0 = Instant::now();
        let (ok, detail) = f();
        let secs = t0.elapsed().as_secs_f64();
        let in_time = limit.is_none_or(|l| secs < l);
        let pass = ok && in_time;
        failed += !pass as usize;
        let limit = limit.map_or(String::new(), |l| format!(", limit {l:.0}s"));
        println!("[{}] {:>2}. {name}: {detail} ({secs:.2}s{limit})", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
