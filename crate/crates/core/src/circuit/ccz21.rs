//! The 21-gate logical CCZ on three Steane blocks.
//!
//! Block B/C qubit `k` pairs with a weight-3 logical-Z line `R_k` of block A;
//! the gates are `CCZ(A_j, B_k, C_k)` for `j ∈ R_k`. Every qubit then sits in
//! exactly three gates, and the incidence graph splits into three matchings.

use serde::Serialize;

use super::PieceableCircuit;
use crate::code::{for_each_weight, StabilizerCode};
use crate::pauli::{bits, Pauli};
use crate::{Error, Result};

/// Supports of the weight-3 Z-type logical-Z representatives, sorted.
pub fn steane_lines(code: &StabilizerCode) -> Vec<u64> {
    let id = code.coset_id(&code.logical_z()[0]);
    let span = code.stabilizer().span();
    let mut out = Vec::new();
    for_each_weight(code.n(), 3, |p| {
        if p.x_bits() == 0 && code.is_normalizer(&p) && !span.contains_up_to_phase(&p) && code.coset_id(&p) == id {
            out.push(p.z_bits());
        }
    });
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Ccz21Layout {
    /// Line of block A assigned to each `k`.
    pub lines: Vec<u64>,
    /// Three matchings of `(j, k)` pairs; the first two form piece 1.
    pub layers: Vec<Vec<(usize, usize)>>,
}

impl Ccz21Layout {
    pub fn new(lines: Vec<u64>) -> Result<Self> {
        let layers = split_matchings(&lines).ok_or_else(|| Error::Search("no matching split".into()))?;
        Ok(Self { lines, layers })
    }

    /// Lines in sorted order, first matching split found.
    pub fn reference() -> Self {
        let code = StabilizerCode::builtin("steane7").expect("builtin");
        Self::new(steane_lines(&code)).expect("the line graph is 3-regular")
    }

    /// Gates on the global register A = 0..7, B = 7..14, C = 14..21, layer by layer.
    pub fn gates(&self) -> Vec<Vec<usize>> {
        self.layers
            .iter()
            .flatten()
            .map(|&(j, k)| vec![j, 7 + k, 14 + k])
            .collect()
    }

    /// Largest number of gates any qubit takes part in.
    pub fn max_incidence(&self) -> usize {
        let mut count = [0usize; 21];
        for g in self.gates() {
            for q in g {
                count[q] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// Two pieces: layers `order[0]` and `order[1]`, then `order[2]`.
    pub fn pieceable_with(&self, order: [usize; 3]) -> Result<PieceableCircuit> {
        let code = StabilizerCode::builtin("steane7")?;
        let all_z = Pauli::z_on(7, &(0..7).collect::<Vec<_>>());
        let layer = |i: usize| -> Vec<Vec<usize>> {
            self.layers[i].iter().map(|&(j, k)| vec![j, 7 + k, 14 + k]).collect()
        };
        let mut first = layer(order[0]);
        first.extend(layer(order[1]));
        PieceableCircuit::new(vec![(code.clone(), all_z); 3], vec![first, layer(order[2])])
    }

    pub fn pieceable(&self) -> Result<PieceableCircuit> {
        self.pieceable_with([0, 1, 2])
    }
}

/// Splits the A-k incidence graph into three perfect matchings.
fn split_matchings(lines: &[u64]) -> Option<Vec<Vec<(usize, usize)>>> {
    let edges: Vec<(usize, usize)> = lines
        .iter()
        .enumerate()
        .flat_map(|(k, &l)| bits(l).into_iter().map(move |j| (j, k)))
        .collect();
    let mut colour = vec![usize::MAX; edges.len()];
    fn go(i: usize, edges: &[(usize, usize)], colour: &mut [usize], used_j: &mut [[bool; 3]; 7], used_k: &mut [[bool; 3]; 7]) -> bool {
        if i == edges.len() {
            return true;
        }
        let (j, k) = edges[i];
        for c in 0..3 {
            if !used_j[j][c] && !used_k[k][c] {
                used_j[j][c] = true;
                used_k[k][c] = true;
                colour[i] = c;
                if go(i + 1, edges, colour, used_j, used_k) {
                    return true;
                }
                used_j[j][c] = false;
                used_k[k][c] = false;
            }
        }
        false
    }
    if lines.len() != 7 || lines.iter().any(|l| l.count_ones() != 3) {
        return None;
    }
    let mut used_j = [[false; 3]; 7];
    let mut used_k = [[false; 3]; 7];
    if !go(0, &edges, &mut colour, &mut used_j, &mut used_k) {
        return None;
    }
    let mut layers = vec![Vec::new(); 3];
    for (e, c) in edges.into_iter().zip(colour) {
        layers[c].push(e);
    }
    for l in layers.iter_mut() {
        l.sort_unstable();
    }
    Some(layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_lines_each_point_on_three() {
        let code = StabilizerCode::builtin("steane7").unwrap();
        let lines = steane_lines(&code);
        assert_eq!(lines.len(), 7);
        for j in 0..7 {
            assert_eq!(lines.iter().filter(|l| *l >> j & 1 == 1).count(), 3);
        }
    }

    #[test]
    fn reference_layout_shape() {
        let l = Ccz21Layout::reference();
        assert_eq!(l.gates().len(), 21);
        assert_eq!(l.max_incidence(), 3);
        for layer in &l.layers {
            assert_eq!(layer.len(), 7);
        }
        let pc = l.pieceable().unwrap();
        assert_eq!(pc.pieces.len(), 2);
        assert!(crate::circuit::check_connectivity(&pc).unwrap().is_ok());
    }
}
