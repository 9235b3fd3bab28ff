//! Binary symplectic Pauli algebra.
//!
//! A `Pauli` stores `i^phase · X^x · Z^z` with the X factor to the left of the
//! Z factor on every qubit, so `Y = i·XZ`. Up to 64 qubits are packed into a
//! pair of machine words.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pauli {
    n: u8,
    phase: u8,
    x: u64,
    z: u64,
}

#[inline]
fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Pauli {
            n: n as u8,
            phase: 0,
            x: 0,
            z: 0,
        }
    }

    /// Raw constructor for `i^phase X^x Z^z`.
    pub fn from_bits(n: usize, x: u64, z: u64, phase: u8) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        debug_assert!(x & !mask(n) == 0 && z & !mask(n) == 0);
        Pauli {
            n: n as u8,
            phase: phase & 3,
            x,
            z,
        }
    }

    /// Hermitian single-qubit Pauli `letter` on qubit `q`.
    pub fn single(n: usize, q: usize, letter: char) -> Self {
        assert!(q < n);
        let b = 1u64 << q;
        match letter {
            'I' => Pauli::identity(n),
            'X' => Pauli::from_bits(n, b, 0, 0),
            'Z' => Pauli::from_bits(n, 0, b, 0),
            'Y' => Pauli::from_bits(n, b, b, 1),
            _ => panic!("not a Pauli letter: {letter}"),
        }
    }

    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        let x = qubits.iter().fold(0u64, |m, &q| m | 1 << q);
        Pauli::from_bits(n, x, 0, 0)
    }

    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        let z = qubits.iter().fold(0u64, |m, &q| m | 1 << q);
        Pauli::from_bits(n, 0, z, 0)
    }

    /// Hermitian Pauli with the given letters and sign `+`.
    pub fn from_letters(letters: &[char]) -> Self {
        letters
            .iter()
            .enumerate()
            .fold(Pauli::identity(letters.len()), |acc, (q, &c)| {
                acc * Pauli::single(letters.len(), q, c)
            })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }
    #[inline]
    pub fn x_bits(&self) -> u64 {
        self.x
    }
    #[inline]
    pub fn z_bits(&self) -> u64 {
        self.z
    }
    #[inline]
    pub fn raw_phase(&self) -> u8 {
        self.phase
    }

    /// Symplectic vector packed as `x | z << 64`.
    #[inline]
    pub fn key(&self) -> u128 {
        self.x as u128 | (self.z as u128) << 64
    }

    /// Exponent `s` such that `self = i^s · (tensor product of I/X/Y/Z)`.
    #[inline]
    pub fn sign_exponent(&self) -> u8 {
        (self.phase + 4 - ((self.x & self.z).count_ones() % 4) as u8) % 4
    }

    pub fn is_hermitian(&self) -> bool {
        self.sign_exponent().is_multiple_of(2)
    }

    pub fn is_negative(&self) -> bool {
        self.sign_exponent() == 2
    }

    #[inline]
    pub fn times_i(&self, k: u8) -> Self {
        Pauli {
            phase: (self.phase + k) & 3,
            ..*self
        }
    }

    pub fn negated(&self) -> Self {
        self.times_i(2)
    }

    /// Same operator with sign `+`.
    pub fn unsigned(&self) -> Self {
        Pauli {
            phase: ((self.x & self.z).count_ones() % 4) as u8,
            ..*self
        }
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    #[inline]
    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn support(&self) -> Vec<usize> {
        bits(self.support_mask())
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    pub fn same_up_to_phase(&self, other: &Pauli) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// `true` iff the two operators commute.
    #[inline]
    pub fn commutes_with(&self, other: &Pauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Keeps only the qubits in `keep`, with sign `+`.
    pub fn restricted(&self, keep: u64) -> Self {
        Pauli::from_bits(self.n(), self.x & keep, self.z & keep, 0).unsigned()
    }

    /// Places this operator at `offset` inside an `n_total`-qubit register.
    pub fn embed(&self, n_total: usize, offset: usize) -> Self {
        assert!(offset + self.n() <= n_total);
        Pauli::from_bits(n_total, self.x << offset, self.z << offset, self.phase)
    }

    /// Extracts `len` qubits starting at `offset`, keeping the overall sign.
    pub fn slice(&self, offset: usize, len: usize) -> Self {
        let m = mask(len);
        let x = (self.x >> offset) & m;
        let z = (self.z >> offset) & m;
        let s = self.sign_exponent();
        Pauli::from_bits(len, x, z, (s + ((x & z).count_ones() % 4) as u8) % 4)
    }

    /// Tensor product `self ⊗ other` (self on the low qubits).
    pub fn tensor(&self, other: &Pauli) -> Self {
        let n = self.n() + other.n();
        Pauli::from_bits(
            n,
            self.x | other.x << self.n(),
            self.z | other.z << self.n(),
            (self.phase + other.phase) & 3,
        )
    }

    pub fn try_mul(&self, other: &Pauli) -> Result<Pauli> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n(), other.n()));
        }
        Ok(*self * *other)
    }
}

impl Mul for Pauli {
    type Output = Pauli;

    #[inline]
    fn mul(self, rhs: Pauli) -> Pauli {
        debug_assert_eq!(self.n, rhs.n);
        let swaps = (self.z & rhs.x).count_ones() as u8;
        Pauli {
            n: self.n,
            phase: (self.phase + rhs.phase + 2 * (swaps & 1)) & 3,
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
        }
    }
}

pub fn multiply(p: &Pauli, q: &Pauli) -> Result<Pauli> {
    p.try_mul(q)
}

pub fn commutes(p: &Pauli, q: &Pauli) -> Result<bool> {
    if p.n != q.n {
        return Err(Error::LengthMismatch(p.n(), q.n()));
    }
    Ok(p.commutes_with(q))
}

/// Bit `j` is set iff `error` anticommutes with `generators[j]`.
pub fn syndrome(error: &Pauli, generators: &[Pauli]) -> u64 {
    debug_assert!(generators.len() <= 64);
    generators
        .iter()
        .enumerate()
        .fold(0u64, |s, (j, g)| s | ((!error.commutes_with(g)) as u64) << j)
}

pub fn try_syndrome(error: &Pauli, generators: &[Pauli]) -> Result<u64> {
    if let Some(g) = generators.iter().find(|g| g.n != error.n) {
        return Err(Error::LengthMismatch(error.n(), g.n()));
    }
    if generators.len() > 64 {
        return Err(Error::TooLarge {
            what: "generator list",
            size: generators.len(),
            limit: 64,
        });
    }
    Ok(syndrome(error, generators))
}

pub(crate) fn bits(mut m: u64) -> Vec<usize> {
    let mut v = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        v.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    v
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.sign_exponent() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sign, body) = split_sign(s);
        if body.is_empty() {
            return Err(Error::Parse(format!("empty Pauli string {s:?}")));
        }
        let letters: Vec<char> = body.chars().collect();
        if letters.len() > MAX_QUBITS {
            return Err(Error::TooLarge {
                what: "Pauli string",
                size: letters.len(),
                limit: MAX_QUBITS,
            });
        }
        if let Some(c) = letters.iter().find(|c| !"IXYZ".contains(**c)) {
            return Err(Error::Parse(format!("bad Pauli letter {c:?} in {s:?}")));
        }
        Ok(Pauli::from_letters(&letters).times_i(sign))
    }
}

fn split_sign(s: &str) -> (u8, &str) {
    for (pre, e) in [
        ("+i", 1u8),
        ("-i", 3),
        ("−i", 3),
        ("i", 1),
        ("+", 0),
        ("-", 2),
        ("−", 2),
    ] {
        if let Some(rest) = s.strip_prefix(pre) {
            return (e, rest);
        }
    }
    (0, s)
}

impl Serialize for Pauli {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Pauli {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Row-reduced GF(2) span of Paulis with exact products kept per row.
#[derive(Clone, Debug, Default)]
pub struct Span {
    rows: Vec<(u32, Pauli)>,
}

#[inline]
fn lead(k: u128) -> u32 {
    127 - k.leading_zeros()
}

impl Span {
    pub fn new() -> Self {
        Span { rows: Vec::new() }
    }

    pub fn from_paulis<'a>(ps: impl IntoIterator<Item = &'a Pauli>) -> Self {
        let mut s = Span::new();
        for p in ps {
            s.insert(*p);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Multiplies `p` by span elements until its symplectic vector is reduced.
    pub fn reduce(&self, p: Pauli) -> Pauli {
        let mut r = p;
        for (l, row) in &self.rows {
            if (r.key() >> l) & 1 == 1 {
                r = r * *row;
            }
        }
        r
    }

    /// Returns false if `p` was already in the span (mod phase).
    pub fn insert(&mut self, p: Pauli) -> bool {
        let r = self.reduce(p);
        if r.key() == 0 {
            return false;
        }
        let l = lead(r.key());
        let pos = self.rows.partition_point(|(m, _)| *m > l);
        self.rows.insert(pos, (l, r));
        true
    }

    pub fn contains_up_to_phase(&self, p: &Pauli) -> bool {
        self.reduce(*p).key() == 0
    }

    /// `Some(sign exponent)` such that `p = i^e · g` for the span element `g`
    /// built from the inserted operators, or `None` if `p` is outside.
    pub fn phase_relative(&self, p: &Pauli) -> Option<u8> {
        let mut r = *p;
        let mut prod = Pauli::identity(p.n());
        for (l, row) in &self.rows {
            if (r.key() >> l) & 1 == 1 {
                r = r * *row;
                prod = prod * *row;
            }
        }
        if r.key() != 0 {
            return None;
        }
        // p · prod = i^a I and prod · prod = i^b I, so p = i^(a-b) prod.
        let a = r.raw_phase();
        let b = (prod * prod).raw_phase();
        Some((a + 4 - b) % 4)
    }
}

/// Independent commuting Hermitian generators with real signs.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerGroup {
    n: usize,
    gens: Vec<Pauli>,
}

impl fmt::Debug for StabilizerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.gens.iter().map(|g| g.to_string())).finish()
    }
}

/// Enumeration ceiling for group-sized scans.
pub const MAX_ENUM_RANK: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Outside,
    Plus,
    Minus,
}

impl StabilizerGroup {
    pub fn new(n: usize, gens: Vec<Pauli>) -> Result<Self> {
        for g in &gens {
            if g.n() != n {
                return Err(Error::LengthMismatch(n, g.n()));
            }
            if !g.is_hermitian() {
                return Err(Error::InvalidGroup(format!("imaginary sign on {g}")));
            }
        }
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::InvalidGroup(format!("{a} and {b} anticommute")));
                }
            }
        }
        let mut span = Span::new();
        for g in &gens {
            if !span.insert(*g) {
                return Err(Error::InvalidGroup(format!("{g} is dependent")));
            }
        }
        Ok(StabilizerGroup { n, gens })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Pauli] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn span(&self) -> Span {
        Span::from_paulis(&self.gens)
    }

    pub fn membership(&self, p: &Pauli) -> Membership {
        if p.is_identity() {
            return match p.sign_exponent() {
                0 => Membership::Plus,
                2 => Membership::Minus,
                _ => Membership::Outside,
            };
        }
        match self.span().phase_relative(p) {
            Some(0) => Membership::Plus,
            Some(2) => Membership::Minus,
            _ => Membership::Outside,
        }
    }

    pub fn contains(&self, p: &Pauli) -> bool {
        self.membership(p) == Membership::Plus
    }

    pub fn contains_up_to_sign(&self, p: &Pauli) -> bool {
        self.span().contains_up_to_phase(p)
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.rank() > MAX_ENUM_RANK {
            return Err(Error::TooLarge {
                what: "stabilizer group",
                size: self.rank(),
                limit: MAX_ENUM_RANK,
            });
        }
        Ok(())
    }

    /// All `2^rank` elements in Gray-code order, identity first.
    pub fn elements(&self) -> Result<GrayElements<'_>> {
        self.check_enumerable()?;
        Ok(GrayElements::new(&self.gens, self.n))
    }
}

/// Iterates the group generated by `gens` in Gray-code order.
pub struct GrayElements<'a> {
    gens: &'a [Pauli],
    cur: Pauli,
    i: u64,
}

impl<'a> GrayElements<'a> {
    pub fn new(gens: &'a [Pauli], n: usize) -> Self {
        GrayElements {
            gens,
            cur: Pauli::identity(n),
            i: 0,
        }
    }
}

impl Iterator for GrayElements<'_> {
    type Item = Pauli;

    fn next(&mut self) -> Option<Pauli> {
        let total = 1u64 << self.gens.len();
        if self.i >= total {
            return None;
        }
        if self.i > 0 {
            let flip = self.i.trailing_zeros() as usize;
            self.cur = self.cur * self.gens[flip];
        }
        self.i += 1;
        Some(self.cur)
    }
}

/// Result of row reduction on the X side of a column window.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub rows: Vec<Pauli>,
    /// Number of leading rows with an X-side pivot inside the window.
    pub rank: usize,
}

/// Row-reduces `rows` on the X bits of `columns` (in the given order).
///
/// Rows are combined by Pauli multiplication so signs stay exact. The first
/// `rank` output rows carry pivots; the rest have no X support on the window.
pub fn gaussian_eliminate(rows: &[Pauli], columns: &[usize]) -> Reduced {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for &c in columns {
        let bit = 1u64 << c;
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].x_bits() & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row.x_bits() & bit != 0 {
                *row = *row * pivot;
            }
        }
        rank += 1;
    }
    Reduced { rows, rank }
}

/// Minimum weight over the coset `p·S`, with the first witness in Gray order.
pub fn coset_min_weight(p: &Pauli, s: &StabilizerGroup) -> Result<(usize, Pauli)> {
    if p.n() != s.n() {
        return Err(Error::LengthMismatch(p.n(), s.n()));
    }
    if let Some(g) = s.gens().iter().find(|g| !g.commutes_with(p)) {
        return Err(Error::NotNormalizer(format!("{p} anticommutes with {g}")));
    }
    let mut best = (p.weight(), *p);
    for g in s.elements()? {
        let q = *p * g;
        if q.weight() < best.0 {
            best = (q.weight(), q);
        }
    }
    Ok(best)
}
