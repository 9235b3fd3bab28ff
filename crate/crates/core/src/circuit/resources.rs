use std::collections::HashSet;
use std::ops::{Add, Mul};

use serde::Serialize;

use super::{Block, Circuit, Component, Op};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceMetrics {
    pub cx_count: u64,
    pub ccz_count: u64,
    pub ancilla_count: u64,
    pub volume: u64,
}

impl Add for ResourceMetrics {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            cx_count: self.cx_count + o.cx_count,
            ccz_count: self.ccz_count + o.ccz_count,
            ancilla_count: self.ancilla_count + o.ancilla_count,
            volume: self.volume + o.volume,
        }
    }
}

impl Mul<u64> for ResourceMetrics {
    type Output = Self;

    fn mul(self, k: u64) -> Self {
        Self {
            cx_count: self.cx_count * k,
            ccz_count: self.ccz_count * k,
            ancilla_count: self.ancilla_count * k,
            volume: self.volume * k,
        }
    }
}

fn is_marker(op: &Op) -> bool {
    matches!(op, Op::Ec { .. } | Op::Segment { .. })
}

/// Index ranges of the scheduling segments.
fn segments(c: &Circuit) -> Vec<(usize, usize, bool)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut counted = true;
    for (i, comp) in c.components.iter().enumerate() {
        if let Op::Segment { counted: k, .. } = &comp.op {
            if i > start {
                out.push((start, i, counted));
            }
            start = i + 1;
            counted = *k;
        }
    }
    if c.components.len() > start {
        out.push((start, c.components.len(), counted));
    }
    out
}

/// Greedy earliest-slot timesteps per segment, with each preparation moved to
/// the step just before the first use of its qubit. Times start at 1.
pub fn schedule(c: &Circuit) -> Circuit {
    let mut out = c.clone();
    for (lo, hi, _) in segments(c) {
        let mut free = vec![0i64; c.n_qubits];
        let mut times: Vec<Option<i64>> = vec![None; hi - lo];
        for i in lo..hi {
            let comp = &c.components[i];
            if is_marker(&comp.op) || comp.op.is_prep() {
                continue;
            }
            let t = comp.qubits.iter().map(|&q| free[q]).max().unwrap_or(0) + 1;
            for &q in &comp.qubits {
                free[q] = t;
            }
            times[i - lo] = Some(t);
        }
        for i in lo..hi {
            let comp = &c.components[i];
            if !comp.op.is_prep() {
                continue;
            }
            let q = comp.qubits[0];
            let first_use = (i + 1..hi)
                .filter(|&j| !c.components[j].op.is_prep() && c.components[j].qubits.contains(&q))
                .find_map(|j| times[j - lo]);
            times[i - lo] = Some(first_use.map_or(1, |t| t - 1));
        }
        let min = times.iter().flatten().copied().min().unwrap_or(1);
        for i in lo..hi {
            out.components[i].time = times[i - lo].map(|t| (t - min + 1) as u32);
        }
    }
    out
}

/// Counts for a scheduled circuit.
///
/// Volume sums, per segment, the steps each touched qubit is live: block
/// qubits from the segment start, other qubits from their first component,
/// or from their preparation when prepared here; all until their measurement
/// or else the segment end.
pub fn resource_metrics(c: &Circuit) -> Result<ResourceMetrics> {
    let data: HashSet<usize> = c
        .blocks
        .iter()
        .flat_map(|b: &Block| b.qubits.iter().copied())
        .collect();
    let ancilla_blocks: HashSet<usize> = c
        .blocks
        .iter()
        .filter(|b| b.ancilla)
        .flat_map(|b| b.qubits.iter().copied())
        .collect();
    let mut m = ResourceMetrics::default();
    let mut ancillas = HashSet::new();
    for (lo, hi, counted) in segments(c) {
        let comps = &c.components[lo..hi];
        let mut span: Option<(u32, u32)> = None;
        for comp in comps.iter().filter(|x| !is_marker(&x.op)) {
            let t = comp
                .time
                .ok_or_else(|| Error::Circuit("unscheduled circuit (no timesteps)".into()))?;
            span = Some(span.map_or((t, t), |(a, b)| (a.min(t), b.max(t))));
            match comp.op {
                Op::Cx => m.cx_count += 1,
                Op::Ccz => m.ccz_count += 1,
                _ => {}
            }
            for &q in &comp.qubits {
                if !data.contains(&q) || ancilla_blocks.contains(&q) {
                    ancillas.insert(q);
                }
            }
        }
        let Some((t0, t1)) = span else { continue };
        if !counted {
            continue;
        }
        let mut qubits: Vec<usize> = comps.iter().flat_map(|x| x.qubits.iter().copied()).collect();
        qubits.sort_unstable();
        qubits.dedup();
        for q in qubits {
            let mine: Vec<&Component> = comps.iter().filter(|x| x.qubits.contains(&q)).collect();
            let first = mine[0];
            let last = mine[mine.len() - 1];
            let start = if first.op.is_prep() || !data.contains(&q) {
                first.time.unwrap()
            } else {
                t0
            };
            let end = if last.op.is_measure() { last.time.unwrap() } else { t1 };
            m.volume += (end - start + 1) as u64;
        }
    }
    m.ancilla_count = ancillas.len() as u64;
    Ok(m)
}

/// A reconstructed circuit with the volume its description states.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub circuit: Circuit,
    pub declared_volume: u64,
}

impl Fixture {
    pub fn metrics(&self) -> ResourceMetrics {
        resource_metrics(&self.circuit).expect("fixtures are scheduled")
    }
}

pub const FIXTURES: &[&str] = &[
    "goto_prep_zero",
    "goto_prep_plus",
    "goto_encode",
    "steane_full_measure",
    "steane_z_measure",
    "cat4_prep",
    "cat4_couple",
    "cat4_decode",
    "ccz_state_postselect",
    "ccz_teleport",
    "pieceable_ccz21",
];

pub fn fixture(name: &str) -> Result<Fixture> {
    let mut b = Builder::default();
    let declared = match name {
        "goto_prep_zero" => {
            let q = b.fresh(8);
            b.goto_prep(&q, false);
            53
        }
        "goto_prep_plus" => {
            let q = b.fresh(8);
            b.goto_prep(&q, true);
            53
        }
        "goto_encode" => {
            let m = b.block("M", 7, true);
            b.encode(&m);
            34
        }
        "steane_full_measure" => {
            let d = b.block("D", 7, false);
            b.full_measure(&d);
            155
        }
        "steane_z_measure" => {
            let d = b.block("D", 7, false);
            b.z_measure(&d);
            81
        }
        "cat4_prep" => {
            let cat = b.fresh(5);
            b.cat_prep(&cat);
            26
        }
        "cat4_couple" => {
            let m: Vec<Vec<usize>> = (0..3).map(|i| b.block(&format!("M{}", i + 1), 7, true)).collect();
            let cat = b.fresh(4);
            b.cat_couple(&cat, &m, 0);
            16 + 4 * 21
        }
        "cat4_decode" => {
            let cat = b.fresh(4);
            b.cat_decode(&cat);
            8
        }
        "ccz_state_postselect" => {
            b.magic_state();
            969
        }
        "ccz_teleport" => {
            let data: Vec<Vec<usize>> = (0..3).map(|i| b.block(&format!("D{}", i + 1), 7, false)).collect();
            let magic = b.magic_state();
            b.teleport(&data, &magic);
            for d in &data {
                b.full_measure(d);
            }
            1518
        }
        "pieceable_ccz21" => {
            let data: Vec<Vec<usize>> = (0..3).map(|i| b.block(&format!("D{}", i + 1), 7, false)).collect();
            let layout = super::Ccz21Layout::reference();
            let gates = layout.gates();
            b.segment("piece_1", true);
            for g in &gates[..14] {
                b.push(Component::ccz(data[0][g[0]], data[1][g[1] - 7], data[2][g[2] - 14]));
            }
            for d in &data {
                b.z_measure(d);
            }
            b.segment("piece_2", true);
            for g in &gates[14..] {
                b.push(Component::ccz(data[0][g[0]], data[1][g[1] - 7], data[2][g[2] - 14]));
            }
            for d in &data {
                b.full_measure(d);
            }
            771
        }
        _ => return Err(Error::UnknownName(format!("fixture {name}"))),
    };
    let name = FIXTURES.iter().find(|f| **f == name).copied().unwrap();
    Ok(Fixture {
        name,
        circuit: schedule(&b.finish()),
        declared_volume: declared,
    })
}

#[derive(Default)]
struct Builder {
    c: Circuit,
    next: usize,
}

// Qubit roles below use 1-based positions within a 7-qubit Steane block.
const ZERO_ORDER: [(usize, usize); 8] = [(2, 5), (3, 5), (3, 7), (2, 6), (5, 1), (4, 6), (4, 1), (4, 7)];
const ENCODE_ORDER: [(usize, usize); 11] = [
    (7, 5),
    (2, 6),
    (3, 1),
    (4, 1),
    (2, 5),
    (3, 5),
    (7, 6),
    (4, 7),
    (4, 6),
    (2, 1),
    (3, 7),
];
const PIVOTS: [usize; 3] = [2, 3, 4];

impl Builder {
    fn fresh(&mut self, k: usize) -> Vec<usize> {
        let out: Vec<usize> = (self.next..self.next + k).collect();
        self.next += k;
        self.c.n_qubits = self.next;
        out
    }

    fn block(&mut self, name: &str, k: usize, ancilla: bool) -> Vec<usize> {
        let qs = self.fresh(k);
        self.c.blocks.push(Block {
            name: name.to_string(),
            qubits: qs.clone(),
            ancilla,
        });
        qs
    }

    fn push(&mut self, comp: Component) {
        self.c.components.push(comp);
    }

    fn segment(&mut self, label: &str, counted: bool) {
        self.push(Component::segment(label, counted));
    }

    fn one(&mut self, op: Op, q: usize) {
        self.push(Component::single(op, q));
    }

    /// Verified `|0̄>` (or `|+̄>` by the dual circuit) on `q[..7]` with flag `q[7]`.
    fn goto_prep(&mut self, q: &[usize], plus: bool) {
        let at = |i: usize| q[i - 1];
        self.segment(if plus { "goto_prep_plus" } else { "goto_prep_zero" }, true);
        let (pivot_prep, other_prep) = if plus {
            (Op::PrepZero, Op::PrepPlus)
        } else {
            (Op::PrepPlus, Op::PrepZero)
        };
        for i in 1..=7 {
            let op = if PIVOTS.contains(&i) { pivot_prep.clone() } else { other_prep.clone() };
            self.one(op, at(i));
        }
        for (c, t) in ZERO_ORDER {
            let g = if plus { Component::cx(at(t), at(c)) } else { Component::cx(at(c), at(t)) };
            self.push(g);
        }
        let flag = q[7];
        self.one(if plus { Op::PrepPlus } else { Op::PrepZero }, flag);
        for i in [5, 6, 7] {
            let g = if plus { Component::cx(flag, at(i)) } else { Component::cx(at(i), flag) };
            self.push(g);
        }
        self.one(if plus { Op::MeasureX } else { Op::MeasureZ }, flag);
    }

    /// Non-fault-tolerant encoder with the input on position 7.
    fn encode(&mut self, m: &[usize]) {
        let at = |i: usize| m[i - 1];
        self.segment("encode", true);
        for i in 1..=6 {
            let op = if PIVOTS.contains(&i) { Op::PrepPlus } else { Op::PrepZero };
            self.one(op, at(i));
        }
        for (c, t) in ENCODE_ORDER {
            self.push(Component::cx(at(c), at(t)));
        }
    }

    /// Z-stabilizer measurement with a verified `|+̄>`.
    fn z_measure(&mut self, d: &[usize]) {
        let a = self.fresh(8);
        self.goto_prep(&a, true);
        self.segment("z_coupling", true);
        for i in 0..7 {
            self.push(Component::cx(d[i], a[i]));
        }
        for &q in &a[..7] {
            self.one(Op::MeasureZ, q);
        }
    }

    /// Full stabilizer measurement with verified `|+̄>` and `|0̄>`.
    fn full_measure(&mut self, d: &[usize]) {
        let a0 = self.fresh(8);
        let a1 = self.fresh(8);
        self.goto_prep(&a0, true);
        self.goto_prep(&a1, false);
        self.segment("full_coupling", true);
        for i in 0..7 {
            self.push(Component::cx(d[i], a0[i]));
        }
        for i in 0..7 {
            self.push(Component::cx(a1[i], d[i]));
        }
        for &q in &a0[..7] {
            self.one(Op::MeasureZ, q);
        }
        for &q in &a1[..7] {
            self.one(Op::MeasureX, q);
        }
    }

    /// 4-CAT on `cat[..4]`, checked with flag `cat[4]`.
    fn cat_prep(&mut self, cat: &[usize]) {
        let (q1, q2, q3, q4, f) = (cat[0], cat[1], cat[2], cat[3], cat[4]);
        self.segment("cat4_prep", true);
        self.one(Op::PrepPlus, q1);
        self.one(Op::PrepZero, q2);
        self.push(Component::cx(q1, q2));
        self.one(Op::PrepZero, q3);
        self.one(Op::PrepZero, q4);
        self.push(Component::cx(q1, q3));
        self.push(Component::cx(q2, q4));
        self.one(Op::PrepZero, f);
        self.push(Component::cx(q1, f));
        self.push(Component::cx(q4, f));
        self.one(Op::MeasureZ, f);
    }

    /// CAT-controlled `X̄ ⊗ CZ̄` on the magic register, checking its stabilizer `which`.
    fn cat_couple(&mut self, cat: &[usize], magic: &[Vec<usize>], which: usize) {
        let (a, b, c) = (&magic[which], &magic[(which + 1) % 3], &magic[(which + 2) % 3]);
        self.segment("cat4_couple", true);
        for i in 0..7 {
            self.push(Component::cx(cat[i % 4], a[i]));
        }
        for i in 0..7 {
            self.push(Component::ccz(cat[(7 + i) % 4], b[i], c[i]));
        }
    }

    fn cat_decode(&mut self, cat: &[usize]) {
        self.segment("cat4_decode", true);
        self.push(Component::cx(cat[0], cat[1]));
        self.push(Component::cx(cat[2], cat[3]));
        self.one(Op::MeasureZ, cat[1]);
        self.one(Op::MeasureZ, cat[3]);
        self.one(Op::MeasureX, cat[0]);
        self.one(Op::MeasureX, cat[2]);
    }

    /// Encoded `|CCZ>` from one physical seed, verified by three CAT checks
    /// and full stabilizer measurement of each block.
    fn magic_state(&mut self) -> Vec<Vec<usize>> {
        let magic: Vec<Vec<usize>> = (0..3).map(|i| self.block(&format!("M{}", i + 1), 7, true)).collect();
        self.segment("ccz_seed", false);
        for m in &magic {
            self.one(Op::PrepPlus, m[6]);
        }
        self.push(Component::ccz(magic[0][6], magic[1][6], magic[2][6]));
        for m in &magic {
            self.encode(m);
        }
        for which in 0..3 {
            let cat = self.fresh(5);
            self.cat_prep(&cat);
            self.cat_couple(&cat[..4], &magic, which);
            self.cat_decode(&cat[..4]);
        }
        for m in &magic {
            self.full_measure(m);
        }
        magic
    }

    fn teleport(&mut self, data: &[Vec<usize>], magic: &[Vec<usize>]) {
        self.segment("teleport", true);
        for (d, m) in data.iter().zip(magic) {
            for i in 0..7 {
                self.push(Component::cx(d[i], m[i]));
            }
        }
        for m in magic {
            for &q in m {
                self.one(Op::MeasureZ, q);
            }
        }
    }

    fn finish(self) -> Circuit {
        self.c
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResourceComparison {
    pub pieceable: ResourceMetrics,
    pub magic_state: ResourceMetrics,
    /// Percent reduction per column, rounded to one decimal.
    pub improvement: [f64; 4],
    /// Caption arithmetic, each as (computed, stated).
    pub identities: Vec<(String, u64, u64)>,
}

impl ResourceComparison {
    pub fn identities_hold(&self) -> bool {
        self.identities.iter().all(|(_, a, b)| a == b)
    }
}

pub fn resource_comparison() -> Result<ResourceComparison> {
    let vol = |n: &str| -> Result<u64> { Ok(fixture(n)?.metrics().volume) };
    let pieceable = fixture("pieceable_ccz21")?.metrics();
    let magic = fixture("ccz_teleport")?.metrics();
    let pct = |a: u64, b: u64| ((b - a) as f64 / b as f64 * 1000.0).round() / 10.0;
    let improvement = [
        pct(pieceable.cx_count, magic.cx_count),
        pct(pieceable.ccz_count, magic.ccz_count),
        pct(pieceable.ancilla_count, magic.ancilla_count),
        pct(pieceable.volume, magic.volume),
    ];
    let goto = vol("goto_prep_zero")?;
    let full = vol("steane_full_measure")?;
    let zonly = vol("steane_z_measure")?;
    let encode = vol("goto_encode")?;
    let cat = vol("cat4_prep")? + 16 + vol("cat4_decode")?;
    let couple_data = vol("cat4_couple")? - 16;
    let post = vol("ccz_state_postselect")?;
    let identities = vec![
        ("goto verified prep".to_string(), goto, 53),
        ("full measurement = 53x2+49".to_string(), full, 53 * 2 + 49),
        ("Z-only measurement".to_string(), zonly, 81),
        ("encoder".to_string(), encode, 34),
        ("CAT prep+couple+decode = 26+16+8".to_string(), cat, 26 + 16 + 8),
        ("CAT coupling data = 4x21".to_string(), couple_data, 4 * 21),
        ("postselected state = 34x3+50x3+4x21x3+155x3".to_string(), post, 34 * 3 + 50 * 3 + 4 * 21 * 3 + 155 * 3),
        ("magic-state total = 969+42x2+155x3".to_string(), magic.volume, 969 + 42 * 2 + 155 * 3),
        ("pieceable total = 3x21+3x81+3x155".to_string(), pieceable.volume, 3 * 21 + 3 * 81 + 3 * 155),
    ];
    Ok(ResourceComparison {
        pieceable,
        magic_state: magic,
        improvement,
        identities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_match_declared_volumes() {
        for name in FIXTURES {
            let f = fixture(name).unwrap();
            assert_eq!(f.metrics().volume, f.declared_volume, "{name}");
        }
    }

    #[test]
    fn table_one() {
        let t = resource_comparison().unwrap();
        let p = ResourceMetrics {
            cx_count: 162,
            ccz_count: 21,
            ancilla_count: 72,
            volume: 771,
        };
        let m = ResourceMetrics {
            cx_count: 312,
            ccz_count: 22,
            ancilla_count: 132,
            volume: 1518,
        };
        assert_eq!(t.pieceable, p);
        assert_eq!(t.magic_state, m);
        assert_eq!(t.improvement, [48.1, 4.5, 45.5, 49.2]);
        assert!(t.identities_hold(), "{:?}", t.identities);
    }

    #[test]
    fn empty_circuit_is_zero() {
        assert_eq!(resource_metrics(&Circuit::new(3)).unwrap(), ResourceMetrics::default());
    }

    #[test]
    fn unscheduled_is_rejected() {
        let mut c = Circuit::new(2);
        c.push(Component::cx(0, 1));
        assert!(resource_metrics(&c).is_err());
        assert_eq!(resource_metrics(&schedule(&c)).unwrap().volume, 2);
    }

    #[test]
    fn volume_additive_over_segments() {
        let a = fixture("goto_prep_zero").unwrap().circuit;
        let b = fixture("cat4_prep").unwrap().circuit;
        let mut joined = a.clone();
        let shift = a.n_qubits;
        joined.n_qubits += b.n_qubits;
        for mut comp in b.components.clone() {
            comp.qubits.iter_mut().for_each(|q| *q += shift);
            joined.components.push(comp);
        }
        let sum = resource_metrics(&a).unwrap() + resource_metrics(&b).unwrap();
        assert_eq!(resource_metrics(&schedule(&joined)).unwrap(), sum);
    }

    #[test]
    fn commuting_layer_reorder_keeps_metrics() {
        let f = fixture("cat4_couple").unwrap();
        let mut c = f.circuit.clone();
        let gates: Vec<usize> = (0..c.components.len())
            .filter(|&i| c.components[i].op == Op::Ccz)
            .collect();
        let (i, j) = (gates[0], gates[gates.len() - 1]);
        c.components.swap(i, j);
        assert_eq!(resource_metrics(&schedule(&c)).unwrap(), f.metrics());
    }
}
