//! Prover strategies: the honest PV and PP plus a small library of scripted
//! deviations.  Each strategy owns its rng and touches the shared registers
//! only through its own `PartyView`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::{CompiledCircuit, Op};
use crate::games::{measure_question, Answer, Item, Question, Representation};
use crate::qsim::{gates, Label, Operator, PartyView};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PpMode {
    Honest,
    /// Flip the reported output bit.
    FlipCf,
    /// Report uniformly random gadget bits.
    RandomC,
    /// Report all-zero gadget bits.
    ZeroC,
    /// Apply the given Pauli to the output wire before measuring it.
    PauliInject(Label),
    /// The complex-conjugate strategy: conjugated game observables and P^dagger corrections.
    Conjugate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PvMode {
    Honest,
    /// Exchange X and Z in every requested observable.
    WrongBasis,
    /// Negate every reported bit.
    FlipOutcomes,
    /// The complex-conjugate strategy.
    Conjugate,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("unknown adversary '{0}'")]
    Unknown(String),
}

impl PpMode {
    pub fn parse(name: &str) -> Result<PpMode, AdversaryError> {
        let (base, arg) = name.split_once(':').unwrap_or((name, ""));
        let mode = match base {
            "honest" | "" => PpMode::Honest,
            "pp_flip_cf" => PpMode::FlipCf,
            "pp_random_c" => PpMode::RandomC,
            "pp_zero_c" => PpMode::ZeroC,
            "pp_conjugate" => PpMode::Conjugate,
            "pp_pauli_inject" => {
                let l = if arg.is_empty() { Label::X } else { Label::parse(arg).ok_or_else(|| AdversaryError::Unknown(name.into()))? };
                if !matches!(l, Label::X | Label::Y | Label::Z) {
                    return Err(AdversaryError::Unknown(name.into()));
                }
                PpMode::PauliInject(l)
            }
            _ => return Err(AdversaryError::Unknown(name.into())),
        };
        Ok(mode)
    }

    pub fn name(self) -> String {
        match self {
            PpMode::Honest => "honest".into(),
            PpMode::FlipCf => "pp_flip_cf".into(),
            PpMode::RandomC => "pp_random_c".into(),
            PpMode::ZeroC => "pp_zero_c".into(),
            PpMode::PauliInject(l) => format!("pp_pauli_inject:{}", l.symbol()),
            PpMode::Conjugate => "pp_conjugate".into(),
        }
    }
}

impl PvMode {
    pub fn parse(name: &str) -> Result<PvMode, AdversaryError> {
        match name {
            "honest" | "" => Ok(PvMode::Honest),
            "pv_wrong_basis" => Ok(PvMode::WrongBasis),
            "pv_flip_outcomes" => Ok(PvMode::FlipOutcomes),
            "pv_conjugate" => Ok(PvMode::Conjugate),
            _ => Err(AdversaryError::Unknown(name.into())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PvMode::Honest => "honest",
            PvMode::WrongBasis => "pv_wrong_basis",
            PvMode::FlipOutcomes => "pv_flip_outcomes",
            PvMode::Conjugate => "pv_conjugate",
        }
    }
}

/// Resolve a (PV, PP) pair by name.  `pv_conjugate` brings its conjugated
/// partner along unless a PP deviation is named explicitly.
pub fn adversary(pv: Option<&str>, pp: Option<&str>) -> Result<(PvMode, PpMode), AdversaryError> {
    let pv = PvMode::parse(pv.unwrap_or("honest"))?;
    let pp = match pp {
        Some(name) => PpMode::parse(name)?,
        None if pv == PvMode::Conjugate => PpMode::Conjugate,
        None => PpMode::Honest,
    };
    Ok((pv, pp))
}

/// The prover that runs the computation (P_EPR's role).  Holds the B halves.
pub struct Pp {
    pub mode: PpMode,
    rng: ChaCha8Rng,
    circ: Option<CompiledCircuit>,
    /// Pair currently carrying logical wire j.
    wires: Vec<usize>,
    /// Auxiliary pair for T gate i.
    aux: Vec<usize>,
}

impl Pp {
    pub fn new(mode: PpMode, seed: u64) -> Pp {
        Pp { mode, rng: ChaCha8Rng::seed_from_u64(seed), circ: None, wires: vec![], aux: vec![] }
    }

    fn representation(&self) -> Representation {
        if self.mode == PpMode::Conjugate {
            Representation::Sigma
        } else {
            Representation::Conjugate
        }
    }

    /// Answer a game question on the B halves.
    pub fn answer(&mut self, q: &Question, view: &mut PartyView<'_>) -> Answer {
        measure_question(q, view, self.representation(), false, &mut self.rng)
    }

    /// Receive the index sets: `inputs[j]` carries wire j, `aux[i]` T gate i.
    pub fn begin(&mut self, circ: &CompiledCircuit, inputs: &[usize], aux: &[usize]) {
        assert_eq!(inputs.len(), circ.n);
        assert_eq!(aux.len(), circ.t());
        self.circ = Some(circ.clone());
        self.wires = inputs.to_vec();
        self.aux = aux.to_vec();
    }

    fn clifford(&mut self, view: &mut PartyView<'_>, op: Op) {
        match op {
            Op::H(w) => {
                let q = view.half(self.wires[w]);
                view.apply_1q(q, &gates::h());
            }
            Op::Cnot(a, b) => {
                let (qa, qb) = (view.half(self.wires[a]), view.half(self.wires[b]));
                view.apply_cnot(qa, qb);
            }
            Op::T(_) => unreachable!("T gates go through the gadget"),
        }
    }

    /// Layer `l` (1-based): Clifford gates, then the T gadgets.  Returns the
    /// gadget bits in T-index order.
    pub fn layer(&mut self, view: &mut PartyView<'_>, l: usize) -> Vec<u8> {
        let circ = self.circ.clone().expect("begin() first");
        let mut out = Vec::new();
        for k in circ.layer_ops(l) {
            match circ.ops[k] {
                Op::T(i) => {
                    let j = circ.t_gates[i].wire;
                    let (data, aux) = (view.half(self.wires[j]), view.half(self.aux[i]));
                    view.apply_cnot(aux, data);
                    let c = view.measure(&Operator::label(data, Label::Z));
                    self.wires[j] = self.aux[i];
                    out.push(c);
                }
                op => self.clifford(view, op),
            }
        }
        match self.mode {
            PpMode::RandomC => out = out.iter().map(|_| self.rng.gen_range(0..2)).collect(),
            PpMode::ZeroC => out.iter_mut().for_each(|b| *b = 0),
            _ => {}
        }
        out
    }

    /// Apply P^{z_i} to the relabelled auxiliaries of layer `l`.
    pub fn correct(&mut self, view: &mut PartyView<'_>, l: usize, z: &[u8]) {
        let circ = self.circ.as_ref().expect("begin() first");
        let ts: Vec<usize> = circ.layer_ops(l).filter_map(|k| if let Op::T(i) = circ.ops[k] { Some(i) } else { None }).collect();
        assert_eq!(ts.len(), z.len(), "one correction bit per T gate of the layer");
        let p = if self.mode == PpMode::Conjugate { gates::p_dg() } else { gates::p() };
        for (&i, &zi) in ts.iter().zip(z) {
            if zi == 1 {
                let q = view.half(self.aux[i]);
                view.apply_1q(q, &p);
            }
        }
    }

    /// Gates after the last T layer, then the output measurement.
    pub fn finish(&mut self, view: &mut PartyView<'_>) -> u8 {
        let circ = self.circ.clone().expect("begin() first");
        for k in circ.layer_ops(circ.d + 1) {
            self.clifford(view, circ.ops[k]);
        }
        let q = view.half(self.wires[0]);
        if let PpMode::PauliInject(l) = self.mode {
            view.apply_1q(q, &l.matrix());
        }
        let cf = view.measure(&Operator::label(q, Label::Z));
        cf ^ u8::from(self.mode == PpMode::FlipCf)
    }

    /// P_EPR with all correction bits known up front (z in T-index order).
    pub fn run_epr(&mut self, view: &mut PartyView<'_>, circ: &CompiledCircuit, inputs: &[usize], aux: &[usize], z: &[u8]) -> (Vec<u8>, u8) {
        self.begin(circ, inputs, aux);
        let mut c = Vec::with_capacity(circ.t());
        let mut next = 0;
        for l in 1..=circ.d {
            let cl = self.layer(view, l);
            let k = cl.len();
            self.correct(view, l, &z[next..next + k]);
            next += k;
            c.extend(cl);
        }
        let cf = self.finish(view);
        (c, cf)
    }
}

/// The prover that plays the verifier's quantum part.  Holds the A halves.
pub struct Pv {
    pub mode: PvMode,
    rng: ChaCha8Rng,
}

impl Pv {
    pub fn new(mode: PvMode, seed: u64) -> Pv {
        Pv { mode, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn representation(&self) -> Representation {
        if self.mode == PvMode::Conjugate {
            Representation::Conjugate
        } else {
            Representation::Sigma
        }
    }

    pub fn answer(&mut self, q: &Question, view: &mut PartyView<'_>) -> Answer {
        let swap = self.mode == PvMode::WrongBasis;
        let mut a = measure_question(q, view, self.representation(), swap, &mut self.rng);
        if self.mode == PvMode::FlipOutcomes {
            a.bits.iter_mut().for_each(|b| *b ^= 1);
        }
        a
    }

    /// Measure sigma_label on the A half of `pair`.
    pub fn measure_label(&mut self, view: &mut PartyView<'_>, pair: usize, label: Label) -> u8 {
        let q = Question::new(vec![Item::Sigma { pair, label }]);
        self.answer(&q, view).bits[0]
    }

    /// V_EPR^0 on the given pairs with the verifier-supplied (x, c, z):
    /// returns (d, e).
    #[allow(clippy::too_many_arguments)]
    pub fn epr_computation(
        &mut self,
        view: &mut PartyView<'_>,
        circ: &CompiledCircuit,
        x: &[u8],
        c: &[u8],
        z: &[u8],
        inputs: &[usize],
        aux: &[usize],
    ) -> (Vec<u8>, Vec<u8>) {
        let slots: Vec<usize> = inputs.iter().chain(aux).copied().collect();
        let walk = crate::epr::v_epr_r(circ, crate::keys::RoundType::Computation, x, c, z, |s, l| {
            self.measure_label(view, slots[s], l)
        });
        (walk.d, walk.e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adversary_names_round_trip() {
        for name in ["pp_flip_cf", "pp_random_c", "pp_zero_c", "pp_conjugate", "pp_pauli_inject:Z"] {
            assert_eq!(PpMode::parse(name).unwrap().name(), name);
        }
        assert_eq!(PpMode::parse("pp_pauli_inject").unwrap(), PpMode::PauliInject(Label::X));
        for name in ["pv_wrong_basis", "pv_flip_outcomes", "pv_conjugate"] {
            assert_eq!(PvMode::parse(name).unwrap().name(), name);
        }
        assert!(PpMode::parse("pp_nope").is_err());
        assert!(PpMode::parse("pp_pauli_inject:F").is_err());
        assert!(PvMode::parse("pp_flip_cf").is_err());
    }

    #[test]
    fn conjugate_pv_pairs_by_default() {
        assert_eq!(adversary(Some("pv_conjugate"), None).unwrap(), (PvMode::Conjugate, PpMode::Conjugate));
        assert_eq!(adversary(Some("pv_conjugate"), Some("honest")).unwrap(), (PvMode::Conjugate, PpMode::Honest));
        assert_eq!(adversary(None, None).unwrap(), (PvMode::Honest, PpMode::Honest));
    }
}
