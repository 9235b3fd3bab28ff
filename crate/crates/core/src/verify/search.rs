//! Smallest number of pieces for a two-qubit-gate circuit, by exhaustive
//! search over gate orders and boundary placements.
//!
//! The gates are Clifford, so every stabilizer stays Pauli at every cut and
//! a decoder may see the full syndrome history. A configuration passes when
//! some decoder exists: single faults that produce the same history must
//! share one Pauli correction that leaves every one of them correctable.

use std::collections::HashMap;

use itertools::Itertools;
use serde::Serialize;

use crate::circuit::{Op, PieceableCircuit};
use crate::code::{conjugate_cx, conjugate_cz, for_each_weight, StabilizerCode};
use crate::errprop::paulis_on;
use crate::par;
use crate::parsec::LookupTable;
use crate::pauli::{syndrome, Pauli, Span};
use crate::{Error, Result};

pub const MAX_SEARCH_GATES: usize = 12;

/// One code block as the search sees it: gate frame, offset, decoder.
#[derive(Clone, Debug)]
struct SearchBlock {
    code: StabilizerCode,
    offset: usize,
    lookup: LookupTable,
    span: Span,
    t: usize,
    /// Paulis of weight at most `t`.
    small: Vec<Pauli>,
}

impl SearchBlock {
    fn new(code: StabilizerCode, offset: usize) -> Result<Self> {
        let t = (code.distance()? - 1) / 2;
        let mut small = Vec::new();
        for w in 0..=t {
            for_each_weight(code.n(), w, |p| small.push(p));
        }
        Ok(Self {
            lookup: LookupTable::new(code.gens())?,
            span: code.stabilizer().span(),
            t,
            small,
            code,
            offset,
        })
    }

    fn local(&self, p: &Pauli) -> Pauli {
        p.slice(self.offset, self.code.n()).unsigned()
    }

    fn correctable(&self, e: &Pauli) -> bool {
        let r = self.lookup.decode(self.lookup.syndrome(e));
        r.weight() <= self.t && self.span.contains_up_to_phase(&(r * *e))
    }
}

#[derive(Clone, Debug)]
pub struct PieceSearch {
    blocks: Vec<SearchBlock>,
    n: usize,
    gates: Vec<Vec<usize>>,
    op: Op,
    /// Each symmetry as a permutation of gate indices.
    symmetries: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Refutation {
    pub pieces: usize,
    pub orders: usize,
    pub configurations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub min_pieces: usize,
    /// Passing configuration as gates per piece.
    pub witness: Vec<Vec<Vec<usize>>>,
    pub symmetries: usize,
    /// Piece counts below `min_pieces`, each exhausted.
    pub refuted: Vec<Refutation>,
}

/// A history and the final errors of the faults that produce it.
type Groups = HashMap<Vec<u64>, Vec<Pauli>>;

impl PieceSearch {
    /// `codes` are in the frame the gates act in.
    pub fn new(codes: Vec<StabilizerCode>, gates: Vec<Vec<usize>>, op: Op) -> Result<Self> {
        if !matches!(op, Op::Cz | Op::Cx) {
            return Err(Error::Unsupported(format!("search over {op:?} gates")));
        }
        if gates.len() > MAX_SEARCH_GATES {
            return Err(Error::TooLarge {
                what: "search gates",
                size: gates.len(),
                limit: MAX_SEARCH_GATES,
            });
        }
        let mut blocks = Vec::new();
        let mut offset = 0;
        for code in codes {
            let n = code.n();
            blocks.push(SearchBlock::new(code, offset)?);
            offset += n;
        }
        let rows: usize = blocks.iter().map(|b| b.code.gens().len()).sum();
        if rows > 64 {
            return Err(Error::TooLarge {
                what: "syndrome width",
                size: rows,
                limit: 64,
            });
        }
        if gates.iter().any(|g| g.len() != 2 || g.iter().any(|&q| q >= offset)) {
            return Err(Error::Circuit("search gates must be two-qubit gates on the register".into()));
        }
        let mut s = Self {
            blocks,
            n: offset,
            gates,
            op,
            symmetries: Vec::new(),
        };
        s.symmetries = s.find_symmetries()?;
        Ok(s)
    }

    /// The round-robin CZ of a two-block pieceable circuit, in its gate frame.
    pub fn from_pieceable(pc: &PieceableCircuit) -> Result<Self> {
        if pc.blocks.len() != 2 {
            return Err(Error::Unsupported("piece search needs a two-block CZ circuit".into()));
        }
        let codes = pc.blocks.iter().map(|b| b.frame_code()).collect();
        Self::new(codes, pc.gates().cloned().collect(), Op::Cz)
    }

    /// `CX(i, n + i)` between two copies of `code`.
    pub fn transversal_cx(code: &StabilizerCode) -> Result<Self> {
        let n = code.n();
        let gates = (0..n).map(|i| vec![i, n + i]).collect();
        Self::new(vec![code.clone(), code.clone()], gates, Op::Cx)
    }

    pub fn gates(&self) -> &[Vec<usize>] {
        &self.gates
    }

    pub fn symmetry_count(&self) -> usize {
        self.symmetries.len()
    }

    fn gate_index(&self) -> HashMap<Vec<usize>, usize> {
        let key = |g: &Vec<usize>| match self.op {
            Op::Cz => g.iter().copied().sorted().collect(),
            _ => g.clone(),
        };
        self.gates.iter().enumerate().map(|(i, g)| (key(g), i)).collect()
    }

    /// Qubit relabellings that preserve every block's stabilizer group and
    /// the gate set, as gate permutations. Within a block only gate-touched
    /// qubits move; whole blocks may swap when their codes agree.
    fn find_symmetries(&self) -> Result<Vec<Vec<usize>>> {
        let touched = |b: &SearchBlock| -> Vec<usize> {
            (0..b.code.n())
                .filter(|&l| self.gates.iter().flatten().any(|&q| q == b.offset + l))
                .collect()
        };
        let mut local_perms = Vec::new();
        for b in &self.blocks {
            let moving = touched(b);
            let mut ok = Vec::new();
            for image in moving.iter().copied().permutations(moving.len()) {
                let mut perm: Vec<usize> = (0..b.code.n()).collect();
                for (&from, &to) in moving.iter().zip(&image) {
                    perm[from] = to;
                }
                if b.code.permute(&perm)?.same_stabilizer(&b.code) {
                    ok.push(perm);
                }
            }
            local_perms.push(ok);
        }
        let h = self.blocks.len();
        let index = self.gate_index();
        let key = |g: Vec<usize>| match self.op {
            Op::Cz => g.into_iter().sorted().collect::<Vec<_>>(),
            _ => g,
        };
        let mut out: Vec<Vec<usize>> = Vec::new();
        for moves in (0..h).permutations(h) {
            let same = moves.iter().enumerate().all(|(j, &k)| {
                self.blocks[j].code.n() == self.blocks[k].code.n()
                    && self.blocks[j].code.same_stabilizer(&self.blocks[k].code)
                    && touched(&self.blocks[j]) == touched(&self.blocks[k])
            });
            if !same {
                continue;
            }
            for choice in local_perms.iter().map(|v| v.iter()).multi_cartesian_product() {
                let map = |q: usize| {
                    let j = self.blocks.iter().rposition(|b| b.offset <= q).expect("qubit in a block");
                    let l = q - self.blocks[j].offset;
                    self.blocks[moves[j]].offset + choice[j][l]
                };
                let perm: Option<Vec<usize>> = self
                    .gates
                    .iter()
                    .map(|g| index.get(&key(g.iter().map(|&q| map(q)).collect())).copied())
                    .collect();
                if let Some(p) = perm {
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        Ok(out)
    }

    fn conjugate(&self, p: Pauli, g: &[usize]) -> Pauli {
        match self.op {
            Op::Cz => conjugate_cz(&p, g[0], g[1]),
            _ => conjugate_cx(&p, g[0], g[1]),
        }
    }

    fn global_gens(&self) -> Vec<Pauli> {
        self.blocks
            .iter()
            .flat_map(|b| b.code.gens().iter().map(|g| g.embed(self.n, b.offset)))
            .collect()
    }

    /// Syndrome histories of every single fault of `pieces` (gate indices).
    fn histories(&self, pieces: &[Vec<usize>]) -> Groups {
        let m = pieces.len();
        let mut cuts = Vec::with_capacity(m);
        let mut gens = self.global_gens();
        for piece in pieces {
            for &g in piece {
                gens = gens.iter().map(|s| self.conjugate(*s, &self.gates[g])).collect();
            }
            cuts.push(gens.clone());
        }
        let mut groups: Groups = HashMap::new();
        // fault injected before gate `pos` of piece `k`
        let mut run = |mut e: Pauli, k: usize, pos: usize| {
            let mut hist = vec![0u64; m];
            for (kk, piece) in pieces.iter().enumerate().skip(k) {
                let from = if kk == k { pos } else { 0 };
                for &g in &piece[from.min(piece.len())..] {
                    e = self.conjugate(e, &self.gates[g]);
                }
                hist[kk] = syndrome(&e, &cuts[kk]);
            }
            groups.entry(hist).or_default().push(e);
        };
        let singles = || (0..self.n).flat_map(|q| paulis_on(self.n, &[q]));
        run(Pauli::identity(self.n), 0, 0);
        for e in singles() {
            run(e, 0, 0);
        }
        for (k, piece) in pieces.iter().enumerate() {
            for (i, &g) in piece.iter().enumerate() {
                for e in paulis_on(self.n, &self.gates[g]) {
                    run(e, k, i + 1);
                }
            }
            // data fault left behind by the EC after piece k
            if k + 1 < m {
                for e in singles() {
                    run(e, k + 1, 0);
                }
            }
        }
        // after the final EC nothing measures the error again
        for e in singles() {
            groups.entry(vec![0; m]).or_default().push(e);
        }
        let rows = cuts.first().map_or(0, |c| c.len());
        for k in 0..m {
            for bit in 0..rows {
                let mut hist = vec![0u64; m];
                hist[k] = 1 << bit;
                groups.entry(hist).or_default().push(Pauli::identity(self.n));
            }
        }
        groups
    }

    fn group_has_correction(&self, errors: &[Pauli]) -> bool {
        self.blocks.iter().all(|b| {
            let e0 = b.local(&errors[0]);
            b.small.iter().any(|w| {
                let fix = e0 * *w;
                errors.iter().all(|e| b.correctable(&(b.local(e) * fix)))
            })
        })
    }

    /// Whether some history decoder makes every single fault correctable.
    pub fn passes(&self, pieces: &[Vec<usize>]) -> bool {
        self.histories(pieces).values().all(|es| self.group_has_correction(es))
    }

    /// A history no single correction can serve, if any.
    pub fn failing_history(&self, pieces: &[Vec<usize>]) -> Option<Vec<u64>> {
        self.histories(pieces)
            .into_iter()
            .filter(|(_, es)| !self.group_has_correction(es))
            .map(|(h, _)| h)
            .min()
    }

    /// Gate orders that are lexicographically least in their symmetry orbit.
    pub fn canonical_orders(&self) -> Vec<Vec<usize>> {
        let g = self.gates.len();
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(g);
        let mut used = vec![false; g];
        let live: Vec<usize> = (0..self.symmetries.len()).collect();
        self.extend_orders(&mut prefix, &mut used, &live, &mut out);
        out
    }

    /// Depth-first extension; `live` holds the symmetries whose image of
    /// the prefix still equals the prefix.
    fn extend_orders(&self, prefix: &mut Vec<usize>, used: &mut [bool], live: &[usize], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == self.gates.len() {
            out.push(prefix.clone());
            return;
        }
        for next in 0..self.gates.len() {
            if used[next] {
                continue;
            }
            let mut keep = Vec::with_capacity(live.len());
            let mut smaller = false;
            for &s in live {
                let image = self.symmetries[s][next];
                if image < next {
                    smaller = true;
                    break;
                }
                if image == next {
                    keep.push(s);
                }
            }
            if smaller {
                continue;
            }
            used[next] = true;
            prefix.push(next);
            self.extend_orders(prefix, used, &keep, out);
            prefix.pop();
            used[next] = false;
        }
    }

    /// Every canonical order with every split into `m` nonempty pieces.
    pub fn configurations(&self, m: usize) -> Vec<Vec<Vec<usize>>> {
        let g = self.gates.len();
        if m == 0 || m > g {
            return Vec::new();
        }
        let orders = self.canonical_orders();
        let splits: Vec<Vec<usize>> = (1..g).combinations(m - 1).collect();
        let mut out = Vec::with_capacity(orders.len() * splits.len());
        for o in &orders {
            for cut in &splits {
                let mut pieces = Vec::with_capacity(m);
                let mut start = 0;
                for &c in cut.iter().chain([&g]) {
                    pieces.push(o[start..c].to_vec());
                    start = c;
                }
                out.push(pieces);
            }
        }
        out
    }

    /// First passing configuration with `m` pieces in enumeration order.
    pub fn search(&self, m: usize) -> (Option<Vec<Vec<usize>>>, usize) {
        let configs = self.configurations(m);
        let found = par::find_first(&configs, |c| self.passes(c));
        let n = configs.len();
        (found.map(|i| configs[i].clone()), n)
    }

    pub fn as_gates(&self, pieces: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
        pieces
            .iter()
            .map(|p| p.iter().map(|&g| self.gates[g].clone()).collect())
            .collect()
    }
}

/// Smallest `m <= max_m` with a passing configuration; every smaller `m` is
/// refuted exhaustively up to symmetry.
pub fn search_min_pieces(s: &PieceSearch, max_m: usize) -> Result<SearchOutcome> {
    let orders = s.canonical_orders().len();
    let mut refuted = Vec::new();
    for m in 1..=max_m.min(s.gates.len()) {
        let (found, configurations) = s.search(m);
        match found {
            Some(w) => {
                return Ok(SearchOutcome {
                    min_pieces: m,
                    witness: s.as_gates(&w),
                    symmetries: s.symmetry_count(),
                    refuted,
                })
            }
            None => refuted.push(Refutation {
                pieces: m,
                orders,
                configurations,
            }),
        }
    }
    Err(Error::Search(format!("no passing configuration with at most {max_m} pieces")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{five_cz_two_piece, synth_gamma};

    pub(crate) fn shor_cz() -> PieceableCircuit {
        let code = StabilizerCode::builtin("shor9").unwrap();
        let p = Pauli::x_on(9, &[0, 1, 2]);
        let letter = ['Z', 'X', 'Y']
            .into_iter()
            .find(|&l| code.coset_id(&code.logical(l).unwrap()) == code.coset_id(&p))
            .unwrap();
        let target: String = [letter, letter].iter().collect();
        synth_gamma(&[(code.clone(), p), (code, p)], &target).unwrap()
    }

    fn index_of(s: &PieceSearch, pieces: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
        pieces
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&(a, b)| s.gates().iter().position(|g| g == &vec![a, b]).unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn shor_symmetry_group() {
        let s = PieceSearch::from_pieceable(&shor_cz()).unwrap();
        assert_eq!(s.symmetry_count(), 72);
        // the group acts freely on orders of nine distinct gates
        assert_eq!(s.canonical_orders().len(), 362_880 / 72);
    }

    #[test]
    fn shor_known_three_piece_split_passes() {
        let s = PieceSearch::from_pieceable(&shor_cz()).unwrap();
        let w = index_of(
            &s,
            &[
                vec![(1, 9), (0, 9), (0, 10), (1, 11)],
                vec![(2, 9)],
                vec![(0, 11), (1, 10), (2, 10), (2, 11)],
            ],
        );
        assert!(s.passes(&w), "{:?}", s.failing_history(&w));
        assert!(!s.passes(&[(0..9).collect()]));
    }

    #[test]
    fn symmetric_configurations_agree() {
        let s = PieceSearch::from_pieceable(&shor_cz()).unwrap();
        for (k, order) in s.canonical_orders().iter().step_by(97).take(40).enumerate() {
            let cut = 1 + k % 8;
            let pieces = vec![order[..cut].to_vec(), order[cut..].to_vec()];
            let want = s.passes(&pieces);
            for sym in s.symmetries.iter().step_by(7) {
                let image: Vec<Vec<usize>> = pieces.iter().map(|p| p.iter().map(|&g| sym[g]).collect()).collect();
                assert_eq!(s.passes(&image), want);
            }
        }
    }

    #[test]
    fn shor_cz_needs_three_pieces() {
        let s = PieceSearch::from_pieceable(&shor_cz()).unwrap();
        let out = search_min_pieces(&s, 4).unwrap();
        assert_eq!(out.min_pieces, 3);
        let two = out.refuted.iter().find(|r| r.pieces == 2).unwrap();
        assert_eq!(two.configurations, 5040 * 8);
        let w = index_of(
            &s,
            &out.witness
                .iter()
                .map(|p| p.iter().map(|g| (g[0], g[1])).collect())
                .collect::<Vec<_>>(),
        );
        assert!(s.passes(&w));
    }

    #[test]
    fn five_qubit_cz_needs_two_pieces() {
        let s = PieceSearch::from_pieceable(&five_cz_two_piece()).unwrap();
        let out = search_min_pieces(&s, 3).unwrap();
        assert_eq!(out.min_pieces, 2);
        assert_eq!(out.refuted.len(), 1);
        // the two-piece circuit from the synthesis also passes
        let pc = five_cz_two_piece();
        let known: Vec<Vec<usize>> = pc
            .pieces
            .iter()
            .map(|p| p.iter().map(|g| s.gates().iter().position(|h| h == g).unwrap()).collect())
            .collect();
        assert!(s.passes(&known));
    }

    #[test]
    fn transversal_cx_needs_one_piece() {
        let s = PieceSearch::transversal_cx(&StabilizerCode::builtin("steane7").unwrap()).unwrap();
        let out = search_min_pieces(&s, 2).unwrap();
        assert_eq!(out.min_pieces, 1);
        assert!(out.refuted.is_empty());
        assert_eq!(out.witness[0].len(), 7);
    }

    #[test]
    fn trivial_round_keeps_a_pass() {
        let s = PieceSearch::from_pieceable(&five_cz_two_piece()).unwrap();
        let (w, _) = s.search(2);
        let mut w = w.unwrap();
        for at in 0..=w.len() {
            let mut more = w.clone();
            more.insert(at, Vec::new());
            assert!(s.passes(&more), "empty piece at {at}");
        }
        // splitting further keeps a pass too
        let last = w.len() - 1;
        let half = w[last].len() / 2;
        let tail = w[last].split_off(half);
        w.push(tail);
        assert!(s.passes(&w));
    }
}

