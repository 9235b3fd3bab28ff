//! Circuit representation, round-robin synthesis, piecing and resource counts.

mod ccz21;
mod resources;
mod synth;

pub use ccz21::{steane_lines, Ccz21Layout};
pub use resources::{
    fixture, resource_metrics, schedule, resource_comparison, Fixture, ResourceMetrics, ResourceComparison, FIXTURES,
};
pub use synth::{
    check_connectivity, five_cz_two_piece, plan_pieces, round_robin, round_robin_gates, synth_gamma,
    GammaBlock, PiecePlan, PieceableCircuit,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clifford::Clifford1;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EcStage {
    Intermediate,
    Final,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Clifford(Clifford1),
    Cz,
    Cx,
    Ccz,
    /// Multi-controlled Z on any number of qubits.
    Chz,
    PrepZero,
    PrepPlus,
    MeasureZ,
    MeasureX,
    /// Pauli applied conditionally on an earlier outcome.
    ControlledPauli(char),
    Ec { stage: EcStage, blocks: Vec<String> },
    /// Starts a new scheduling segment; `counted` is false for segments left
    /// out of volume totals.
    Segment { label: String, counted: bool },
}

impl Op {
    pub fn is_diagonal_multi(&self) -> bool {
        matches!(self, Op::Cz | Op::Ccz | Op::Chz)
    }

    pub fn is_prep(&self) -> bool {
        matches!(self, Op::PrepZero | Op::PrepPlus)
    }

    pub fn is_measure(&self) -> bool {
        matches!(self, Op::MeasureZ | Op::MeasureX)
    }

    fn arity(&self) -> Option<usize> {
        match self {
            Op::Clifford(_) | Op::PrepZero | Op::PrepPlus | Op::MeasureZ | Op::MeasureX => Some(1),
            Op::ControlledPauli(_) => Some(1),
            Op::Cz | Op::Cx => Some(2),
            Op::Ccz => Some(3),
            _ => None,
        }
    }

    pub fn gate_name(&self) -> String {
        match self {
            Op::Clifford(c) => c.name(),
            Op::Cz => "CZ".into(),
            Op::Cx => "CX".into(),
            Op::Ccz => "CCZ".into(),
            Op::Chz => "CHZ".into(),
            Op::PrepZero => "PREP_Z".into(),
            Op::PrepPlus => "PREP_X".into(),
            Op::MeasureZ => "MEAS_Z".into(),
            Op::MeasureX => "MEAS_X".into(),
            Op::ControlledPauli(p) => format!("CPAULI_{p}"),
            Op::Ec { .. } => "EC".into(),
            Op::Segment { .. } => "SEGMENT".into(),
        }
    }

    fn from_gate_name(name: &str) -> Result<Op> {
        Ok(match name {
            "CZ" => Op::Cz,
            "CX" | "CNOT" => Op::Cx,
            "CCZ" => Op::Ccz,
            "CHZ" => Op::Chz,
            "PREP_Z" => Op::PrepZero,
            "PREP_X" => Op::PrepPlus,
            "MEAS_Z" => Op::MeasureZ,
            "MEAS_X" => Op::MeasureX,
            _ => {
                if let Some(p) = name.strip_prefix("CPAULI_") {
                    match p {
                        "X" | "Y" | "Z" => Op::ControlledPauli(p.chars().next().unwrap()),
                        _ => return Err(Error::Parse(format!("gate {name}"))),
                    }
                } else {
                    Op::Clifford(Clifford1::by_name(name)?)
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub op: Op,
    pub qubits: Vec<usize>,
    pub time: Option<u32>,
}

impl Component {
    pub fn new(op: Op, qubits: Vec<usize>) -> Self {
        Self {
            op,
            qubits,
            time: None,
        }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(Op::Cz, vec![a, b])
    }

    pub fn cx(c: usize, t: usize) -> Self {
        Self::new(Op::Cx, vec![c, t])
    }

    pub fn ccz(a: usize, b: usize, c: usize) -> Self {
        Self::new(Op::Ccz, vec![a, b, c])
    }

    /// Diagonal multi-controlled Z picking the narrowest gate kind.
    pub fn diagonal(qubits: Vec<usize>) -> Self {
        let op = match qubits.len() {
            2 => Op::Cz,
            3 => Op::Ccz,
            _ => Op::Chz,
        };
        Self::new(op, qubits)
    }

    pub fn single(op: Op, q: usize) -> Self {
        Self::new(op, vec![q])
    }

    pub fn ec(stage: EcStage, blocks: Vec<String>) -> Self {
        Self::new(Op::Ec { stage, blocks }, Vec::new())
    }

    pub fn segment(label: &str, counted: bool) -> Self {
        Self::new(
            Op::Segment {
                label: label.to_string(),
                counted,
            },
            Vec::new(),
        )
    }

    pub fn at(mut self, t: u32) -> Self {
        self.time = Some(t);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub qubits: Vec<usize>,
    /// Counted as ancilla in resource totals (e.g. a magic-state register).
    #[serde(default)]
    pub ancilla: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub blocks: Vec<Block>,
    pub components: Vec<Component>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ..Default::default()
        }
    }

    pub fn add_block(&mut self, name: &str, qubits: Vec<usize>) -> &mut Self {
        self.blocks.push(Block {
            name: name.to_string(),
            qubits,
            ancilla: false,
        });
        self
    }

    pub fn push(&mut self, c: Component) -> &mut Self {
        self.components.push(c);
        self
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn block_of(&self, q: usize) -> Option<&Block> {
        self.blocks.iter().find(|b| b.qubits.contains(&q))
    }

    pub fn count(&self, op: &Op) -> usize {
        self.components.iter().filter(|c| &c.op == op).count()
    }

    /// Number of pieces, i.e. intermediate error corrections plus one.
    pub fn piece_count(&self) -> usize {
        1 + self
            .components
            .iter()
            .filter(|c| matches!(c.op, Op::Ec { stage: EcStage::Intermediate, .. }))
            .count()
    }

    /// Checks operand ranges, arities, distinct operands and block names.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.n_qubits];
        for b in &self.blocks {
            for &q in &b.qubits {
                if q >= self.n_qubits {
                    return Err(Error::Circuit(format!("block {} qubit {q} out of range", b.name)));
                }
                if std::mem::replace(&mut seen[q], true) {
                    return Err(Error::Circuit(format!("qubit {q} in two blocks")));
                }
            }
        }
        for (i, c) in self.components.iter().enumerate() {
            if let Some(k) = c.op.arity() {
                if c.qubits.len() != k {
                    return Err(Error::Circuit(format!("component {i}: {} takes {k} qubits", c.op.gate_name())));
                }
            }
            if c.op == Op::Chz && c.qubits.len() < 2 {
                return Err(Error::Circuit(format!("component {i}: CHZ needs 2+ qubits")));
            }
            for (j, &q) in c.qubits.iter().enumerate() {
                if q >= self.n_qubits {
                    return Err(Error::Circuit(format!("component {i}: qubit {q} out of range")));
                }
                if c.qubits[..j].contains(&q) {
                    return Err(Error::Circuit(format!("component {i}: repeated qubit {q}")));
                }
            }
            if let Op::Ec { blocks, .. } = &c.op {
                for b in blocks {
                    if self.block(b).is_none() {
                        return Err(Error::Circuit(format!("component {i}: unknown block {b}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("QUBITS {}\n", self.n_qubits);
        for b in &self.blocks {
            let kw = if b.ancilla { "ABLOCK" } else { "BLOCK" };
            s += &format!("{kw} {} {}\n", b.name, join(&b.qubits));
        }
        for c in &self.components {
            match &c.op {
                Op::Ec { stage, blocks } => {
                    let st = match stage {
                        EcStage::Intermediate => "intermediate",
                        EcStage::Final => "final",
                    };
                    s += &format!("EC {st} {}\n", blocks.join(" "));
                    if *stage == EcStage::Intermediate {
                        s += "PIECE-BREAK\n";
                    }
                }
                Op::Segment { label, counted } => {
                    s += &format!("SEGMENT {label}{}\n", if *counted { "" } else { " uncounted" });
                }
                op => {
                    s += &format!("GATE {} {}", op.gate_name(), join(&c.qubits));
                    if let Some(t) = c.time {
                        s += &format!(" @{t}");
                    }
                    s.push('\n');
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Circuit::default();
        let mut have_n = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}", ln + 1));
            let mut toks = line.split_whitespace();
            let kw = toks.next().unwrap();
            let rest: Vec<&str> = toks.collect();
            match kw {
                "QUBITS" => {
                    c.n_qubits = rest.first().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad QUBITS"))?;
                    have_n = true;
                }
                "BLOCK" | "ABLOCK" => {
                    let (name, qs) = rest.split_first().ok_or_else(|| err("missing block name"))?;
                    c.blocks.push(Block {
                        name: name.to_string(),
                        qubits: parse_qubits(qs).map_err(|e| err(&e))?,
                        ancilla: kw == "ABLOCK",
                    });
                }
                "GATE" => {
                    let (name, args) = rest.split_first().ok_or_else(|| err("missing gate kind"))?;
                    let op = Op::from_gate_name(name).map_err(|e| err(&e.to_string()))?;
                    let (qs, time) = match args.last().and_then(|t| t.strip_prefix('@')) {
                        Some(t) => (&args[..args.len() - 1], Some(t.parse().map_err(|_| err("bad time"))?)),
                        None => (args, None),
                    };
                    c.components.push(Component {
                        op,
                        qubits: parse_qubits(qs).map_err(|e| err(&e))?,
                        time,
                    });
                }
                "EC" => {
                    let (stage, blocks) = rest.split_first().ok_or_else(|| err("missing EC stage"))?;
                    let stage = match *stage {
                        "intermediate" => EcStage::Intermediate,
                        "final" => EcStage::Final,
                        _ => return Err(err("EC stage must be intermediate or final")),
                    };
                    c.components
                        .push(Component::ec(stage, blocks.iter().map(|b| b.to_string()).collect()));
                }
                "PIECE-BREAK" => {
                    let ok = matches!(
                        c.components.last(),
                        Some(Component { op: Op::Ec { stage: EcStage::Intermediate, .. }, .. })
                    );
                    if !ok {
                        return Err(err("PIECE-BREAK must follow an intermediate EC"));
                    }
                }
                "SEGMENT" => {
                    let label = rest.first().ok_or_else(|| err("missing segment label"))?;
                    let counted = rest.get(1) != Some(&"uncounted");
                    c.components.push(Component::segment(label, counted));
                }
                _ => return Err(err(&format!("unknown keyword {kw}"))),
            }
        }
        if !have_n {
            c.n_qubits = c
                .blocks
                .iter()
                .flat_map(|b| b.qubits.iter())
                .chain(c.components.iter().flat_map(|x| x.qubits.iter()))
                .map(|q| q + 1)
                .max()
                .unwrap_or(0);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CircuitJson::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: CircuitJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let c = j.try_into()?;
        Circuit::validate(&c)?;
        Ok(c)
    }

    /// Reads the text format, or JSON when the content starts with `{`.
    pub fn parse(content: &str) -> Result<Self> {
        if content.trim_start().starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(content).map_err(|e| Error::Parse(e.to_string()))?;
            Circuit::from_json(&v)
        } else {
            Circuit::from_text(content)
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn join(qs: &[usize]) -> String {
    qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_qubits(toks: &[&str]) -> std::result::Result<Vec<usize>, String> {
    toks.iter()
        .map(|t| t.parse().map_err(|_| format!("bad qubit {t:?}")))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    qubits: usize,
    blocks: Vec<Block>,
    components: Vec<ComponentJson>,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stage: Option<EcStage>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    blocks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counted: Option<bool>,
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        let components = c
            .components
            .iter()
            .map(|x| {
                let mut j = ComponentJson {
                    kind: x.op.gate_name(),
                    qubits: x.qubits.clone(),
                    time: x.time,
                    stage: None,
                    blocks: Vec::new(),
                    label: None,
                    counted: None,
                };
                match &x.op {
                    Op::Ec { stage, blocks } => {
                        j.stage = Some(*stage);
                        j.blocks = blocks.clone();
                    }
                    Op::Segment { label, counted } => {
                        j.label = Some(label.clone());
                        j.counted = Some(*counted);
                    }
                    _ => {}
                }
                j
            })
            .collect();
        CircuitJson {
            qubits: c.n_qubits,
            blocks: c.blocks.clone(),
            components,
        }
    }
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = Error;

    fn try_from(j: CircuitJson) -> Result<Self> {
        let mut components = Vec::new();
        for x in j.components {
            let op = match x.kind.as_str() {
                "EC" => Op::Ec {
                    stage: x.stage.ok_or_else(|| Error::Parse("EC without stage".into()))?,
                    blocks: x.blocks,
                },
                "SEGMENT" => Op::Segment {
                    label: x.label.unwrap_or_default(),
                    counted: x.counted.unwrap_or(true),
                },
                name => Op::from_gate_name(name)?,
            };
            components.push(Component {
                op,
                qubits: x.qubits,
                time: x.time,
            });
        }
        Ok(Circuit {
            n_qubits: j.qubits,
            blocks: j.blocks,
            components,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Circuit {
        let mut c = Circuit::new(6);
        c.add_block("A", vec![0, 1, 2]).add_block("B", vec![3, 4, 5]);
        c.push(Component::single(Op::Clifford(Clifford1::by_name("K").unwrap()), 0))
            .push(Component::cz(0, 3).at(1))
            .push(Component::ec(EcStage::Intermediate, vec!["A".into(), "B".into()]))
            .push(Component::ccz(1, 4, 5))
            .push(Component::ec(EcStage::Final, vec!["A".into(), "B".into()]));
        c
    }

    #[test]
    fn text_and_json_round_trip() {
        let c = sample();
        let text = c.to_text();
        assert!(text.contains("PIECE-BREAK"));
        assert!(text.contains("GATE CZ 0 3 @1"));
        assert_eq!(Circuit::from_text(&text).unwrap(), c);
        assert_eq!(Circuit::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(c.piece_count(), 2);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Circuit::from_text("QUBITS 2\nGATE CZ 0 0\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nGATE CZ 0 2\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nGATE CCZ 0 1\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nPIECE-BREAK\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nEC final A\n").is_err());
        assert!(Circuit::from_text("QUBITS 2\nGATE FOO 0\n").is_err());
    }
}
