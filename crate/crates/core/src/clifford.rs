//! The 24-element single-qubit Clifford group and per-qubit layers of it.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Single-qubit Pauli as `(x, z, raw phase)` in the `i^phase X^x Z^z` form.
type Tiny = (u8, u8, u8);

#[derive(Clone, Debug)]
pub struct CliffordElement {
    /// Word in H and S, written as an operator product (rightmost acts first).
    pub word: String,
    /// Images of I, X, Z and XZ, indexed by `x | z << 1`.
    images: [Tiny; 4],
    pub matrix: [[Complex64; 2]; 2],
}

impl CliffordElement {
    pub fn image_x(&self) -> Pauli {
        let (x, z, ph) = self.images[1];
        Pauli::from_bits(1, x as u64, z as u64, ph)
    }

    pub fn image_z(&self) -> Pauli {
        let (x, z, ph) = self.images[2];
        Pauli::from_bits(1, x as u64, z as u64, ph)
    }
}

fn tiny_mul(a: Tiny, b: Tiny) -> Tiny {
    let swap = a.1 & b.0;
    (a.0 ^ b.0, a.1 ^ b.1, (a.2 + b.2 + 2 * swap) & 3)
}

fn images_from(ix: Tiny, iz: Tiny) -> [Tiny; 4] {
    [(0, 0, 0), ix, iz, tiny_mul(ix, iz)]
}

fn apply_images(images: &[Tiny; 4], p: Tiny) -> Tiny {
    let (x, z, ph) = p;
    let (nx, nz, nph) = images[(x | z << 1) as usize];
    (nx, nz, (nph + ph) & 3)
}

fn mat_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub struct CliffordTable {
    pub elements: Vec<CliffordElement>,
    /// `compose[a][b]` is the index of `a · b` (b acts first).
    compose: Vec<Vec<u8>>,
    inverse: Vec<u8>,
}

const ALIASES: &[(&str, &str)] = &[("K", "SH"), ("X", "HSSH"), ("Z", "SS"), ("Sdg", "SSS")];

impl CliffordTable {
    fn build() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let h_img = images_from((0, 1, 0), (1, 0, 0));
        let s_img = images_from((1, 1, 1), (0, 1, 0));
        let h_mat = [
            [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
            [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
        ];
        let s_mat = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
        ];
        let id = CliffordElement {
            word: "I".into(),
            images: images_from((1, 0, 0), (0, 1, 0)),
            matrix: [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        };
        let gens = [("H", h_img, h_mat), ("S", s_img, s_mat)];
        let mut elements = vec![id];
        let mut frontier = 0;
        while frontier < elements.len() {
            let base = elements[frontier].clone();
            for (name, img, mat) in &gens {
                let ix = apply_images(img, base.images[1]);
                let iz = apply_images(img, base.images[2]);
                if elements.iter().any(|e| e.images[1] == ix && e.images[2] == iz) {
                    continue;
                }
                let word = if base.word == "I" {
                    name.to_string()
                } else {
                    format!("{name}{}", base.word)
                };
                elements.push(CliffordElement {
                    word,
                    images: images_from(ix, iz),
                    matrix: mat_mul(mat, &base.matrix),
                });
            }
            frontier += 1;
        }
        assert_eq!(elements.len(), 24);
        let find = |ix: Tiny, iz: Tiny| {
            elements
                .iter()
                .position(|e| e.images[1] == ix && e.images[2] == iz)
                .unwrap() as u8
        };
        let mut compose = vec![vec![0u8; 24]; 24];
        for a in 0..24 {
            for b in 0..24 {
                let ix = apply_images(&elements[a].images, elements[b].images[1]);
                let iz = apply_images(&elements[a].images, elements[b].images[2]);
                compose[a][b] = find(ix, iz);
            }
        }
        let inverse = (0..24)
            .map(|a| (0..24u8).find(|&b| compose[a][b as usize] == 0).unwrap())
            .collect();
        CliffordTable {
            elements,
            compose,
            inverse,
        }
    }

    pub fn get() -> &'static CliffordTable {
        static TABLE: OnceLock<CliffordTable> = OnceLock::new();
        TABLE.get_or_init(CliffordTable::build)
    }
}

/// Index into the 24-element table; index 0 is the identity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clifford1(pub u8);

impl Clifford1 {
    pub const IDENTITY: Clifford1 = Clifford1(0);

    pub fn all() -> impl Iterator<Item = Clifford1> {
        (0..24u8).map(Clifford1)
    }

    fn elem(&self) -> &'static CliffordElement {
        &CliffordTable::get().elements[self.0 as usize]
    }

    pub fn by_name(name: &str) -> Result<Clifford1> {
        let word = ALIASES
            .iter()
            .find(|(a, _)| *a == name)
            .map(|(_, w)| *w)
            .unwrap_or(name);
        if let Some(i) = CliffordTable::get().elements.iter().position(|e| e.word == word) {
            return Ok(Clifford1(i as u8));
        }
        if name == "Kdg" {
            return Ok(Clifford1::by_name("K")?.inverse());
        }
        if name == "Y" {
            return Ok(Clifford1::by_name("X")?.then(Clifford1::by_name("Z")?));
        }
        Err(Error::UnknownName(format!("single-qubit Clifford {name}")))
    }

    pub fn name(&self) -> String {
        for alias in ["K", "X", "Z", "Sdg"] {
            if Clifford1::by_name(alias).ok() == Some(*self) {
                return alias.to_string();
            }
        }
        for alias in ["Y", "Kdg"] {
            if Clifford1::by_name(alias).ok() == Some(*self) {
                return alias.to_string();
            }
        }
        self.elem().word.clone()
    }

    pub fn is_identity(&self) -> bool {
        self.0 == 0
    }

    pub fn inverse(&self) -> Clifford1 {
        Clifford1(CliffordTable::get().inverse[self.0 as usize])
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: Clifford1) -> Clifford1 {
        Clifford1(CliffordTable::get().compose[next.0 as usize][self.0 as usize])
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.elem().matrix
    }

    pub fn image_x(&self) -> Pauli {
        self.elem().image_x()
    }

    pub fn image_z(&self) -> Pauli {
        self.elem().image_z()
    }

    /// True when the gate maps Z to ±Z (so it commutes with diagonal dressing).
    pub fn is_diagonal(&self) -> bool {
        let iz = self.elem().images[2];
        iz.0 == 0
    }

    /// Conjugates qubit `q` of `p`: returns `C p C†`.
    #[inline]
    pub fn conjugate(&self, p: &Pauli, q: usize) -> Pauli {
        let x = ((p.x_bits() >> q) & 1) as u8;
        let z = ((p.z_bits() >> q) & 1) as u8;
        if x == 0 && z == 0 {
            return *p;
        }
        let (nx, nz, ph) = self.elem().images[(x | z << 1) as usize];
        let b = 1u64 << q;
        Pauli::from_bits(
            p.n(),
            (p.x_bits() & !b) | (nx as u64) << q,
            (p.z_bits() & !b) | (nz as u64) << q,
            p.raw_phase() + ph,
        )
    }
}

impl fmt::Debug for Clifford1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Clifford1({})", self.name())
    }
}

impl fmt::Display for Clifford1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// One single-qubit Clifford per qubit.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct LocalClifford(pub Vec<Clifford1>);

impl LocalClifford {
    pub fn identity(n: usize) -> Self {
        LocalClifford(vec![Clifford1::IDENTITY; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn inverse(&self) -> Self {
        LocalClifford(self.0.iter().map(|c| c.inverse()).collect())
    }

    pub fn conjugate(&self, p: &Pauli) -> Pauli {
        assert_eq!(p.n(), self.n());
        let mut out = *p;
        for q in crate::pauli::bits(p.support_mask()) {
            out = self.0[q].conjugate(&out, q);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|c| c.is_identity())
    }

    /// Parses e.g. `"K1 Y3 K5"` (1-based qubits) into a layer on `n` qubits.
    pub fn parse_sparse(n: usize, s: &str) -> Result<Self> {
        let mut lc = LocalClifford::identity(n);
        for tok in s.split_whitespace() {
            let split = tok
                .find(|c: char| c.is_ascii_digit())
                .ok_or_else(|| Error::Parse(format!("missing qubit in {tok:?}")))?;
            let (name, q) = tok.split_at(split);
            let q: usize = q.parse().map_err(|_| Error::Parse(format!("bad qubit in {tok:?}")))?;
            if q == 0 || q > n {
                return Err(Error::Parse(format!("qubit {q} out of range")));
            }
            lc.0[q - 1] = Clifford1::by_name(name)?;
        }
        Ok(lc)
    }
}
