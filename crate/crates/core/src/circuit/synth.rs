use serde::Serialize;

use super::{Circuit, Component, EcStage, Op};
use crate::clifford::{Clifford1, LocalClifford};
use crate::code::{z_form_layer, StabilizerCode};
use crate::pauli::Pauli;
use crate::{Error, Result};

/// One code block of a Γ circuit.
#[derive(Clone, Debug)]
pub struct GammaBlock {
    pub name: String,
    pub code: StabilizerCode,
    /// Logical operator whose support the round-robin gates are wired to.
    pub normalizer: Pauli,
    /// Prologue layer taking `normalizer` to `+Z` on its support.
    pub frame: LocalClifford,
    pub offset: usize,
}

impl GammaBlock {
    pub fn n(&self) -> usize {
        self.code.n()
    }

    /// The block's code seen from inside the prologue.
    pub fn frame_code(&self) -> StabilizerCode {
        self.code
            .apply_local_clifford(&self.frame)
            .expect("frame sized to the code")
    }

    /// Global indices of the normalizer's support.
    pub fn active(&self) -> Vec<usize> {
        self.normalizer.support().into_iter().map(|q| q + self.offset).collect()
    }

    pub fn contains(&self, q: usize) -> bool {
        (self.offset..self.offset + self.n()).contains(&q)
    }
}

/// Prologue, diagonal pieces separated by intermediate EC, epilogue, final EC.
#[derive(Clone, Debug)]
pub struct PieceableCircuit {
    pub blocks: Vec<GammaBlock>,
    /// Gates as global qubit lists, one qubit per participating block.
    pub pieces: Vec<Vec<Vec<usize>>>,
}

impl PieceableCircuit {
    /// Blocks named A, B, C, ... with prologues from [`z_form_layer`].
    pub fn new(blocks: Vec<(StabilizerCode, Pauli)>, pieces: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let frames = blocks.iter().map(|(_, p)| z_form_layer(p)).collect();
        Self::with_frames(blocks, frames, pieces)
    }

    pub fn with_frames(
        blocks: Vec<(StabilizerCode, Pauli)>,
        frames: Vec<LocalClifford>,
        pieces: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        let mut offset = 0;
        for (j, ((code, p), frame)) in blocks.into_iter().zip(frames).enumerate() {
            code.check_logical(&p)?;
            let image = frame.conjugate(&p);
            if image != Pauli::z_on(p.n(), &p.support()) {
                return Err(Error::Circuit(format!("frame does not take {p} to +Z form")));
            }
            let n = code.n();
            out.push(GammaBlock {
                name: block_name(j),
                code,
                normalizer: p,
                frame,
                offset,
            });
            offset += n;
        }
        let pc = PieceableCircuit { blocks: out, pieces };
        pc.validate()?;
        Ok(pc)
    }

    fn validate(&self) -> Result<()> {
        for g in self.gates() {
            let mut used = vec![false; self.blocks.len()];
            for &q in g {
                let j = self
                    .block_index(q)
                    .ok_or_else(|| Error::Circuit(format!("qubit {q} outside all blocks")))?;
                if !self.blocks[j].active().contains(&q) {
                    return Err(Error::Circuit(format!("gate {g:?} touches inactive qubit {q}")));
                }
                if std::mem::replace(&mut used[j], true) {
                    return Err(Error::Circuit(format!("gate {g:?} has two qubits in block {j}")));
                }
            }
            if g.len() < 2 {
                return Err(Error::Circuit(format!("gate {g:?} is not multi-qubit")));
            }
        }
        Ok(())
    }

    pub fn n_total(&self) -> usize {
        self.blocks.iter().map(|b| b.n()).sum()
    }

    pub fn block_index(&self, q: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(q))
    }

    pub fn gates(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.pieces.iter().flatten()
    }

    pub fn gate_count(&self) -> usize {
        self.gates().count()
    }

    /// Prologue of all blocks as one layer on the full register.
    pub fn frame(&self) -> LocalClifford {
        LocalClifford(self.blocks.iter().flat_map(|b| b.frame.0.iter().copied()).collect())
    }

    pub fn with_pieces(&self, pieces: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let pc = PieceableCircuit {
            blocks: self.blocks.clone(),
            pieces,
        };
        pc.validate()?;
        Ok(pc)
    }

    /// All gates in a single piece, in their current order.
    pub fn unpieced(&self) -> Self {
        PieceableCircuit {
            blocks: self.blocks.clone(),
            pieces: vec![self.gates().cloned().collect()],
        }
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n_total());
        for b in &self.blocks {
            c.add_block(&b.name, (b.offset..b.offset + b.n()).collect());
        }
        let names: Vec<String> = self.blocks.iter().map(|b| b.name.clone()).collect();
        let layer = |c: &mut Circuit, lc: &LocalClifford| {
            for (q, g) in lc.0.iter().enumerate() {
                if !g.is_identity() {
                    c.push(Component::single(Op::Clifford(*g), q));
                }
            }
        };
        let frame = self.frame();
        layer(&mut c, &frame);
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                c.push(Component::ec(EcStage::Intermediate, names.clone()));
            }
            for g in piece {
                c.push(Component::diagonal(g.clone()));
            }
        }
        layer(&mut c, &frame.inverse());
        c.push(Component::ec(EcStage::Final, names));
        c
    }

    /// Recovers the structure from a circuit, matching `codes` to its blocks in
    /// order. Each block's normalizer is read off as the pre-image of `+Z` on
    /// the qubits its gates touch.
    pub fn from_circuit(c: &Circuit, codes: &[StabilizerCode]) -> Result<Self> {
        if c.blocks.len() != codes.len() {
            return Err(Error::Circuit(format!(
                "{} blocks but {} codes",
                c.blocks.len(),
                codes.len()
            )));
        }
        let mut offset = 0;
        for (b, code) in c.blocks.iter().zip(codes) {
            let expected: Vec<usize> = (offset..offset + code.n()).collect();
            if b.qubits != expected {
                return Err(Error::Circuit(format!("block {} must cover qubits {expected:?}", b.name)));
            }
            offset += code.n();
        }
        let n = offset;
        let mut pro = vec![Clifford1::IDENTITY; n];
        let mut epi = vec![Clifford1::IDENTITY; n];
        let mut pieces: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        let mut stage = 0; // 0 prologue, 1 pieces, 2 epilogue, 3 done
        for comp in &c.components {
            match &comp.op {
                Op::Clifford(g) => {
                    let q = comp.qubits[0];
                    match stage {
                        0 => pro[q] = pro[q].then(*g),
                        1 | 2 => {
                            stage = 2;
                            epi[q] = epi[q].then(*g);
                        }
                        _ => return Err(Error::Circuit("gate after final EC".into())),
                    }
                }
                op if op.is_diagonal_multi() => {
                    if stage > 1 {
                        return Err(Error::Circuit("diagonal gate after the epilogue".into()));
                    }
                    stage = 1;
                    pieces.last_mut().unwrap().push(comp.qubits.clone());
                }
                Op::Ec { stage: EcStage::Intermediate, .. } => {
                    if stage > 1 {
                        return Err(Error::Circuit("intermediate EC after the epilogue".into()));
                    }
                    stage = 1;
                    pieces.push(Vec::new());
                }
                Op::Ec { stage: EcStage::Final, .. } => stage = 3,
                Op::Segment { .. } => {}
                op => {
                    return Err(Error::Circuit(format!(
                        "{} is not allowed in a pieceable Γ circuit",
                        op.gate_name()
                    )))
                }
            }
        }
        if pro.iter().zip(&epi).any(|(a, b)| a.then(*b) != Clifford1::IDENTITY) {
            return Err(Error::Circuit("epilogue does not invert the prologue".into()));
        }
        let mut blocks = Vec::new();
        let mut frames = Vec::new();
        for (b, code) in c.blocks.iter().zip(codes) {
            let lo = b.qubits[0];
            let mut touched: Vec<usize> = pieces
                .iter()
                .flatten()
                .flatten()
                .filter(|&&q| b.qubits.contains(&q))
                .map(|q| q - lo)
                .collect();
            touched.sort_unstable();
            touched.dedup();
            let frame = LocalClifford(pro[lo..lo + code.n()].to_vec());
            let p = frame.inverse().conjugate(&Pauli::z_on(code.n(), &touched));
            blocks.push((code.clone(), p));
            frames.push(frame);
        }
        let mut pc = Self::with_frames(blocks, frames, pieces)?;
        for (b, orig) in pc.blocks.iter_mut().zip(&c.blocks) {
            b.name = orig.name.clone();
        }
        Ok(pc)
    }
}

fn block_name(j: usize) -> String {
    if j < 26 {
        ((b'A' + j as u8) as char).to_string()
    } else {
        format!("B{j}")
    }
}

/// Cartesian product of the sets in lexicographic order.
pub fn round_robin_gates(sets: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if a.iter().any(|q| b.contains(q)) {
                return Err(Error::Circuit("round-robin sets overlap".into()));
            }
        }
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for s in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                s.iter().map(move |&q| {
                    let mut g = prefix.clone();
                    g.push(q);
                    g
                })
            })
            .collect();
    }
    Ok(out)
}

pub fn round_robin(sets: &[Vec<usize>]) -> Result<Circuit> {
    let gates = round_robin_gates(sets)?;
    let n = sets.iter().flatten().map(|q| q + 1).max().unwrap_or(0);
    let mut c = Circuit::new(n);
    for g in gates {
        c.push(Component::diagonal(g));
    }
    Ok(c)
}

/// Prologue, round-robin multi-controlled Z and epilogue for logical Γ(target).
///
/// Each normalizer must lie in the logical class named by its target letter.
pub fn synth_gamma(codes: &[(StabilizerCode, Pauli)], target: &str) -> Result<PieceableCircuit> {
    let letters: Vec<char> = target.chars().collect();
    if letters.len() != codes.len() || codes.len() < 2 {
        return Err(Error::Circuit(format!(
            "target {target} needs one letter per block and at least two blocks"
        )));
    }
    for ((code, p), &l) in codes.iter().zip(&letters) {
        let want = code.logical(l)?;
        code.check_logical(p)?;
        if code.coset_id(p) != code.coset_id(&want) {
            return Err(Error::Circuit(format!("{p} is not a logical {l} of {}", code.label())));
        }
    }
    let mut offset = 0;
    let mut sets = Vec::new();
    for (code, p) in codes {
        sets.push(p.support().into_iter().map(|q| q + offset).collect());
        offset += code.n();
    }
    let gates = round_robin_gates(&sets)?;
    PieceableCircuit::new(codes.to_vec(), vec![gates])
}

/// The two-piece 5-qubit CZ: six gates, then the three pairs (1,3), (3,5), (5,1).
pub fn five_cz_two_piece() -> PieceableCircuit {
    let code = StabilizerCode::builtin("five_prime").expect("builtin");
    let p = code.logical_z()[0];
    let first = [(0, 5), (0, 9), (2, 5), (2, 7), (4, 7), (4, 9)];
    let second = [(0, 7), (2, 9), (4, 5)];
    let to = |s: &[(usize, usize)]| s.iter().map(|&(a, b)| vec![a, b]).collect();
    PieceableCircuit::new(vec![(code.clone(), p), (code, p)], vec![to(&first), to(&second)])
        .expect("valid layout")
}

/// Composite-qubit piecing of a round-robin circuit.
#[derive(Clone, Debug, Serialize)]
pub struct PiecePlan {
    /// Per block, the active qubits split into groups of at most `d_j - 1`.
    pub groups: Vec<Vec<Vec<usize>>>,
    pub m: Vec<usize>,
    pub pieces: Vec<Vec<Vec<usize>>>,
}

impl PiecePlan {
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// `prod m_j / min m_j`.
    pub fn bound(&self) -> usize {
        self.m.iter().product::<usize>() / self.m.iter().min().copied().unwrap_or(1)
    }
}

pub fn plan_pieces(pc: &PieceableCircuit) -> Result<PiecePlan> {
    let sets: Vec<Vec<usize>> = pc.blocks.iter().map(|b| b.active()).collect();
    let mut want = round_robin_gates(&sets)?;
    let mut have: Vec<Vec<usize>> = pc.gates().cloned().collect();
    want.sort();
    have.sort();
    if want != have {
        return Err(Error::Circuit("not a complete round-robin circuit".into()));
    }
    let mut groups = Vec::new();
    for (b, set) in pc.blocks.iter().zip(&sets) {
        let d = b.code.distance()?;
        if d < 2 {
            return Err(Error::Circuit(format!("block {} has distance {d}", b.name)));
        }
        groups.push(set.chunks(d - 1).map(|c| c.to_vec()).collect::<Vec<_>>());
    }
    let m: Vec<usize> = groups.iter().map(|g: &Vec<Vec<usize>>| g.len()).collect();
    let j0 = (0..m.len()).min_by_key(|&j| m[j]).unwrap();
    let mu = m[j0];
    let others: Vec<usize> = (0..m.len()).filter(|&j| j != j0).collect();
    let mut pieces = Vec::new();
    let mut offsets = vec![0usize; others.len()];
    loop {
        let mut piece = Vec::new();
        for t in 0..mu {
            let mut pick = vec![0usize; m.len()];
            pick[j0] = t;
            for (slot, &j) in others.iter().enumerate() {
                pick[j] = (t + offsets[slot]) % m[j];
            }
            let chosen: Vec<Vec<usize>> = (0..m.len()).map(|j| groups[j][pick[j]].clone()).collect();
            piece.extend(round_robin_gates(&chosen)?);
        }
        pieces.push(piece);
        // odometer over offsets, last slot fastest
        let mut slot = others.len();
        loop {
            if slot == 0 {
                return Ok(PiecePlan { groups, m, pieces });
            }
            slot -= 1;
            offsets[slot] += 1;
            if offsets[slot] < m[others[slot]] {
                break;
            }
            offsets[slot] = 0;
        }
    }
}

/// Worst violation of the per-piece rule: a qubit may share gates with at
/// most `d_j - 1` distinct qubits of each other block `j`.
pub fn check_connectivity(pc: &PieceableCircuit) -> Result<std::result::Result<(), String>> {
    let d: Vec<usize> = pc
        .blocks
        .iter()
        .map(|b| b.code.distance())
        .collect::<Result<_>>()?;
    for (i, piece) in pc.pieces.iter().enumerate() {
        for q in 0..pc.n_total() {
            for (j, b) in pc.blocks.iter().enumerate() {
                if b.contains(q) {
                    continue;
                }
                let mut nb: Vec<usize> = piece
                    .iter()
                    .filter(|g| g.contains(&q))
                    .flatten()
                    .copied()
                    .filter(|&r| b.contains(r))
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                if nb.len() > d[j] - 1 {
                    return Ok(Err(format!(
                        "piece {}: qubit {q} meets {} qubits of block {}",
                        i + 1,
                        nb.len(),
                        b.name
                    )));
                }
            }
        }
    }
    Ok(Ok(()))
}
