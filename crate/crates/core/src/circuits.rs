//! Circuits over {CNOT, H, T}: parsing, the H-pattern compilation with T
//! parities, greedy T-depth layering, and a direct statevector oracle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim::{gates, QsimError, StateVector};

/// Gate on 0-indexed wires.  X, Z and P only exist as input macros.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    T(usize),
    Cnot(usize, usize),
    X(usize),
    Z(usize),
    P(usize),
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot(a, b) => vec![a, b],
            Gate::H(w) | Gate::T(w) | Gate::X(w) | Gate::Z(w) | Gate::P(w) => vec![w],
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::T(_) => "T",
            Gate::Cnot(..) => "CNOT",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::P(_) => "P",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("wire {wire} out of range for a {n}-wire circuit")]
    WireOutOfRange { wire: usize, n: usize },
    #[error("CNOT needs two distinct wires (got {0} twice)")]
    RepeatedWire(usize),
    #[error("gate {0} must be macro-expanded before compilation")]
    Unsupported(&'static str),
    #[error("circuit has no wires")]
    Empty,
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// A circuit on `n` wires; wire 0 (wire 1 in files) is the output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Circuit, CircuitError> {
        if n == 0 {
            return Err(CircuitError::Empty);
        }
        for g in &gates {
            for w in g.wires() {
                if w >= n {
                    return Err(CircuitError::WireOutOfRange { wire: w + 1, n });
                }
            }
            if let Gate::Cnot(a, b) = g {
                if a == b {
                    return Err(CircuitError::RepeatedWire(a + 1));
                }
            }
        }
        Ok(Circuit { n, gates })
    }

    /// Parse the text format: one gate per line (`H 1`, `T 2`, `CNOT 1 2`,
    /// and the macros `X`, `Z`, `P`), 1-indexed wires, `#` comments, and an
    /// optional `wires N` declaration.  Macros are expanded.
    pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
        let mut gates = Vec::new();
        let mut declared = 0usize;
        let mut max_wire = 0usize;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            let err = |msg: String| CircuitError::Parse { line, msg };
            let wire = |s: &str| -> Result<usize, CircuitError> {
                let w: usize = s.parse().map_err(|_| err(format!("bad wire index '{s}'")))?;
                if w == 0 {
                    return Err(err("wires are 1-indexed".into()));
                }
                Ok(w - 1)
            };
            let op = toks[0].to_ascii_uppercase();
            let arity = if op == "CNOT" || op == "CX" { 2 } else { 1 };
            if op == "WIRES" {
                if toks.len() != 2 {
                    return Err(err("expected 'wires N'".into()));
                }
                declared = toks[1].parse().map_err(|_| err(format!("bad wire count '{}'", toks[1])))?;
                continue;
            }
            if toks.len() != arity + 1 {
                return Err(err(format!("{} takes {} wire(s), got {}", toks[0], arity, toks.len() - 1)));
            }
            let w0 = wire(toks[1])?;
            let g = match op.as_str() {
                "H" => Gate::H(w0),
                "T" => Gate::T(w0),
                "X" => Gate::X(w0),
                "Z" => Gate::Z(w0),
                "P" | "S" => Gate::P(w0),
                "CNOT" | "CX" => {
                    let w1 = wire(toks[2])?;
                    if w0 == w1 {
                        return Err(err(format!("CNOT on repeated wire {}", w0 + 1)));
                    }
                    Gate::Cnot(w0, w1)
                }
                other => return Err(err(format!("unknown gate '{other}'"))),
            };
            for w in g.wires() {
                max_wire = max_wire.max(w + 1);
            }
            gates.push(g);
        }
        let n = declared.max(max_wire);
        Circuit::new(n, gates).map(|c| c.expand_macros())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("wires {}\n", self.n);
        for g in &self.gates {
            let ws: Vec<String> = g.wires().iter().map(|w| (w + 1).to_string()).collect();
            s.push_str(&format!("{} {}\n", g.name(), ws.join(" ")));
        }
        s
    }

    /// X -> H T T T T H, Z -> T T T T, P -> T T.
    pub fn expand_macros(&self) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match *g {
                Gate::X(w) => gates.extend([Gate::H(w), Gate::T(w), Gate::T(w), Gate::T(w), Gate::T(w), Gate::H(w)]),
                Gate::Z(w) => gates.extend([Gate::T(w); 4]),
                Gate::P(w) => gates.extend([Gate::T(w); 2]),
                other => gates.push(other),
            }
        }
        Circuit { n: self.n, gates }
    }

    /// Q' = Q followed by X on the output wire (in {H, T} form).
    pub fn append_x_to_output(&self) -> Circuit {
        let mut gates = self.gates.clone();
        gates.extend([Gate::H(0), Gate::T(0), Gate::T(0), Gate::T(0), Gate::T(0), Gate::H(0)]);
        Circuit { n: self.n, gates }
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::T(_))).count()
    }

    /// Q|x> by direct simulation.
    pub fn simulate(&self, x: &[u8]) -> Result<StateVector, CircuitError> {
        let mut s = StateVector::basis(x)?;
        for g in &self.gates {
            match *g {
                Gate::H(w) => s.apply_1q(&gates::h(), w),
                Gate::T(w) => s.apply_1q(&gates::t(), w),
                Gate::X(w) => s.apply_1q(&gates::x(), w),
                Gate::Z(w) => s.apply_1q(&gates::z(), w),
                Gate::P(w) => s.apply_1q(&gates::p(), w),
                Gate::Cnot(a, b) => s.apply_cnot(a, b),
            }
        }
        Ok(s)
    }

    /// ||Pi_0 Q|x>||^2: probability that the output wire reads 0.
    pub fn output_probability(&self, x: &[u8]) -> Result<f64, CircuitError> {
        Ok(self.simulate(x)?.prob_zero(0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Gate in execution order of a compiled circuit.  `T(i)` refers to
/// `t_gates[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    H(usize),
    Cnot(usize, usize),
    T(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TGate {
    pub wire: usize,
    pub parity: Parity,
    /// 1-based layer.
    pub layer: usize,
}

/// The H-pattern-expanded circuit, reordered layer by layer: within a
/// layer all Clifford gates come first, then that layer's T gates.  Gates
/// after the last T layer sit in layer `d + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledCircuit {
    pub n: usize,
    pub ops: Vec<Op>,
    pub op_layer: Vec<usize>,
    pub t_gates: Vec<TGate>,
    pub d: usize,
}

/// Replace every H by H T T H T T H T T H, assign parities and layers.
pub fn compile(circuit: &Circuit) -> Result<CompiledCircuit, CircuitError> {
    let mut expanded = Vec::new();
    for g in &circuit.gates {
        match *g {
            Gate::H(w) => {
                expanded.push(Gate::H(w));
                for _ in 0..3 {
                    expanded.extend([Gate::T(w), Gate::T(w), Gate::H(w)]);
                }
            }
            Gate::T(_) | Gate::Cnot(..) => expanded.push(*g),
            other => return Err(CircuitError::Unsupported(other.name())),
        }
    }

    let n = circuit.n;
    let mut h_parity = vec![Parity::Even; n];
    let mut avail = vec![1usize; n];
    let mut placed: Vec<(usize, bool, Gate, Parity)> = Vec::with_capacity(expanded.len());
    for g in expanded {
        match g {
            Gate::H(w) => {
                h_parity[w] = if h_parity[w] == Parity::Even { Parity::Odd } else { Parity::Even };
                placed.push((avail[w], false, g, Parity::Even));
            }
            Gate::Cnot(a, b) => {
                let l = avail[a].max(avail[b]);
                avail[a] = l;
                avail[b] = l;
                placed.push((l, false, g, Parity::Even));
            }
            Gate::T(w) => {
                let l = avail[w];
                avail[w] = l + 1;
                placed.push((l, true, g, h_parity[w]));
            }
            _ => unreachable!(),
        }
    }
    let d = placed.iter().filter(|p| p.1).map(|p| p.0).max().unwrap_or(0);
    for p in placed.iter_mut() {
        if p.0 > d {
            p.0 = d + 1;
        }
    }
    // stable: (layer, clifford before T)
    placed.sort_by_key(|p| (p.0, p.1));

    let mut ops = Vec::with_capacity(placed.len());
    let mut op_layer = Vec::with_capacity(placed.len());
    let mut t_gates = Vec::new();
    for (layer, _, g, parity) in placed {
        let op = match g {
            Gate::H(w) => Op::H(w),
            Gate::Cnot(a, b) => Op::Cnot(a, b),
            Gate::T(w) => {
                t_gates.push(TGate { wire: w, parity, layer });
                Op::T(t_gates.len() - 1)
            }
            _ => unreachable!(),
        };
        ops.push(op);
        op_layer.push(layer);
    }
    Ok(CompiledCircuit { n, ops, op_layer, t_gates, d })
}

/// Per-layer T counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerCounts {
    pub total: usize,
    pub even: usize,
    pub odd: usize,
}

impl CompiledCircuit {
    pub fn t(&self) -> usize {
        self.t_gates.len()
    }

    /// Counts for layers 1..=d (index 0 is layer 1).
    pub fn layer_counts(&self) -> Vec<LayerCounts> {
        let mut out = vec![LayerCounts { total: 0, even: 0, odd: 0 }; self.d];
        for tg in &self.t_gates {
            let c = &mut out[tg.layer - 1];
            c.total += 1;
            match tg.parity {
                Parity::Even => c.even += 1,
                Parity::Odd => c.odd += 1,
            }
        }
        out
    }

    /// Indices into `ops` belonging to `layer` (1-based; `d + 1` is the tail).
    pub fn layer_ops(&self, layer: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.ops.len()).filter(move |&k| self.op_layer[k] == layer)
    }

    /// T-gate indices of `layer` split by parity, each in ascending order.
    pub fn layer_t_by_parity(&self, layer: usize) -> (Vec<usize>, Vec<usize>) {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for (i, tg) in self.t_gates.iter().enumerate() {
            if tg.layer == layer {
                match tg.parity {
                    Parity::Even => even.push(i),
                    Parity::Odd => odd.push(i),
                }
            }
        }
        (even, odd)
    }

    pub fn parity_count(&self, parity: Parity) -> usize {
        self.t_gates.iter().filter(|t| t.parity == parity).count()
    }

    /// The compiled gate string in execution order, as a plain circuit.
    pub fn as_circuit(&self) -> Circuit {
        let gates = self
            .ops
            .iter()
            .map(|op| match *op {
                Op::H(w) => Gate::H(w),
                Op::Cnot(a, b) => Gate::Cnot(a, b),
                Op::T(i) => Gate::T(self.t_gates[i].wire),
            })
            .collect();
        Circuit { n: self.n, gates }
    }
}
