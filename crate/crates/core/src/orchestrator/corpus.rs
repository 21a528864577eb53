//! The bundled circuit corpus.  Each file may carry a `# input <bits>`
//! line naming the input the experiments use.

use crate::circuits::{compile, Circuit, CompiledCircuit};

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub text: &'static str,
    pub input: Vec<u8>,
}

impl Entry {
    pub fn circuit(&self) -> Circuit {
        Circuit::parse(self.text).expect("bundled circuits parse")
    }

    pub fn compiled(&self) -> CompiledCircuit {
        compile(&self.circuit()).expect("bundled circuits compile")
    }

    pub fn oracle(&self) -> f64 {
        self.circuit().output_probability(&self.input).expect("input fits")
    }
}

/// Parse a bit string such as `0110`.
pub fn parse_bits(s: &str) -> Result<Vec<u8>, String> {
    s.trim()
        .chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(format!("input contains '{other}', expected only 0 and 1")),
        })
        .collect()
}

/// The `# input <bits>` annotation, if present.
pub fn input_hint(text: &str) -> Option<Vec<u8>> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|l| l.trim().strip_prefix("input"))
        .find_map(|rest| parse_bits(rest).ok())
}

macro_rules! entry {
    ($name:literal) => {{
        let text = include_str!(concat!("../../corpus/", $name, ".qc"));
        Entry { name: $name, text, input: input_hint(text).expect("corpus files name an input") }
    }};
}

/// Ten small circuits: n <= 3 and at most 12 T gadgets after compilation.
pub fn corpus() -> Vec<Entry> {
    vec![
        entry!("identity"),
        entry!("t_single"),
        entry!("hh"),
        entry!("ht"),
        entry!("bell"),
        entry!("t_cnot_h"),
        entry!("ghz_t"),
        entry!("t_ladder"),
        entry!("phase_kick"),
        entry!("p_macro"),
    ]
}

/// H T H on |0>: output 0 with probability cos^2(pi/8).
pub fn hth() -> Entry {
    entry!("extra/hth")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_respects_size_limits() {
        let c = corpus();
        assert_eq!(c.len(), 10);
        for e in &c {
            let cc = e.compiled();
            assert!(cc.n <= 3 && cc.t() <= 12, "{}: n={} t={}", e.name, cc.n, cc.t());
            assert_eq!(e.input.len(), cc.n, "{}", e.name);
        }
    }

    #[test]
    fn oracle_values() {
        let want = [0.0, 1.0, 1.0, 0.5, 0.5, 0.0, 1.0, 1.0, 0.5, 0.0];
        for (e, w) in corpus().iter().zip(want) {
            assert!((e.oracle() - w).abs() < 1e-9, "{}: {}", e.name, e.oracle());
        }
        let c = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((hth().oracle() - c).abs() < 1e-12);
    }

    #[test]
    fn bits_parse() {
        assert_eq!(parse_bits("0110").unwrap(), vec![0, 1, 1, 0]);
        assert!(parse_bits("01a").is_err());
        assert_eq!(input_hint("# input 10\nwires 2"), Some(vec![1, 0]));
        assert_eq!(input_hint("wires 2"), None);
    }
}
