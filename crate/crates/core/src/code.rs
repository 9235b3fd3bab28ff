//! Stabilizer codes, the builtin registry, local-Clifford transforms and
//! brute-force structural properties.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::clifford::{Clifford1, LocalClifford};
use crate::error::{Error, Result};
use crate::pauli::{bits, Pauli, Span, StabilizerGroup};

/// Largest block size accepted by exhaustive scans.
pub const MAX_SCAN_QUBITS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub name: Option<String>,
    stabilizer: StabilizerGroup,
    logical_z: Vec<Pauli>,
    logical_x: Vec<Pauli>,
    pub declared_distance: Option<usize>,
}

/// Builtin code names.
pub const BUILTINS: &[&str] = &["five", "five_prime", "steane7", "shor9", "intermediate_10_2_3"];

fn ps(list: &[&str]) -> Vec<Pauli> {
    list.iter().map(|s| s.parse().expect("builtin Pauli")).collect()
}

impl StabilizerCode {
    pub fn new(gens: Vec<Pauli>, logical_z: Vec<Pauli>, logical_x: Vec<Pauli>) -> Result<Self> {
        let n = gens
            .first()
            .or(logical_z.first())
            .map(|p| p.n())
            .ok_or_else(|| Error::InvalidCode("no operators".into()))?;
        let stabilizer = StabilizerGroup::new(n, gens)?;
        let k = n - stabilizer.rank();
        if logical_z.len() != k || logical_x.len() != k {
            return Err(Error::InvalidCode(format!(
                "expected {k} logical pairs, got {}/{}",
                logical_z.len(),
                logical_x.len()
            )));
        }
        for l in logical_z.iter().chain(&logical_x) {
            if l.n() != n {
                return Err(Error::LengthMismatch(n, l.n()));
            }
            if !l.is_hermitian() {
                return Err(Error::InvalidCode(format!("logical {l} is not Hermitian")));
            }
            if let Some(g) = stabilizer.gens().iter().find(|g| !g.commutes_with(l)) {
                return Err(Error::InvalidCode(format!("logical {l} anticommutes with {g}")));
            }
            if stabilizer.contains_up_to_sign(l) {
                return Err(Error::InvalidCode(format!("logical {l} is a stabilizer")));
            }
        }
        for i in 0..k {
            for j in 0..k {
                let zx = logical_z[i].commutes_with(&logical_x[j]);
                if zx == (i == j) {
                    return Err(Error::InvalidCode(format!("bad logical pairing at ({i},{j})")));
                }
                if !logical_z[i].commutes_with(&logical_z[j]) || !logical_x[i].commutes_with(&logical_x[j]) {
                    return Err(Error::InvalidCode("logicals of one type must commute".into()));
                }
            }
        }
        Ok(StabilizerCode {
            name: None,
            stabilizer,
            logical_z,
            logical_x,
            declared_distance: None,
        })
    }

    fn named(mut self, name: &str, d: usize) -> Self {
        self.name = Some(name.to_string());
        self.declared_distance = Some(d);
        self
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let code = match name {
            "five" => Self::new(
                ps(&["ZZXIX", "XZZXI", "IXZZX", "XIXZZ"]),
                ps(&["-XIZIX"]),
                ps(&["-YIXIY"]),
            )?
            .named(name, 3),
            "five_prime" => Self::new(
                ps(&["-YZXIZ", "-ZZZXI", "-IXZZZ", "-ZIXZY"]),
                ps(&["ZIZIZ"]),
                ps(&["XIXIX"]),
            )?
            .named(name, 3),
            "steane7" => Self::new(
                ps(&["XXXXIII", "XXIIXXI", "XIXIXIX", "ZZZZIII", "ZZIIZZI", "ZIZIZIZ"]),
                ps(&["IIIIZZZ"]),
                ps(&["IIIIXXX"]),
            )?
            .named(name, 3),
            "shor9" => Self::new(
                ps(&[
                    "XXXXXXIII",
                    "IIIXXXXXX",
                    "ZZIIIIIII",
                    "IZZIIIIII",
                    "IIIZZIIII",
                    "IIIIZZIII",
                    "IIIIIIZZI",
                    "IIIIIIIZZ",
                ]),
                ps(&["XXXXXXXXX"]),
                ps(&["ZZZZZZZZZ"]),
            )?
            .named(name, 3),
            "intermediate_10_2_3" => {
                // Two five_prime blocks after six of the nine round-robin CZs
                // (all pairs except (1,3), (3,5), (5,1)); the logicals are
                // the five_prime logicals pushed through the same gates.
                let gens = ps(&[
                    "-YZXIZIIZIZ",
                    "-ZZZXIIIIII",
                    "-IXZZZIIIII",
                    "-ZIXZYZIIIZ",
                    "-ZIZIIZIXZY",
                    "-IIIIIIXZZZ",
                    "-IIIIIZZZXI",
                    "-ZIIIZYZXIZ",
                ]);
                let pairs = [(0, 5), (0, 9), (2, 5), (2, 7), (4, 7), (4, 9)];
                let push = |p: Pauli| pairs.iter().fold(p, |acc, &(a, b)| conjugate_cz(&acc, a, b));
                let lz = ps(&["ZIZIZIIIII", "IIIIIZIZIZ"]).into_iter().map(push).collect();
                let lx = ps(&["XIXIXIIIII", "IIIIIXIXIX"]).into_iter().map(push).collect();
                Self::new(gens, lz, lx)?.named(name, 3)
            }
            _ => return Err(Error::UnknownName(format!("code {name}"))),
        };
        Ok(code)
    }

    pub fn n(&self) -> usize {
        self.stabilizer.n()
    }

    pub fn k(&self) -> usize {
        self.logical_z.len()
    }

    pub fn stabilizer(&self) -> &StabilizerGroup {
        &self.stabilizer
    }

    pub fn gens(&self) -> &[Pauli] {
        self.stabilizer.gens()
    }

    pub fn logical_z(&self) -> &[Pauli] {
        &self.logical_z
    }

    pub fn logical_x(&self) -> &[Pauli] {
        &self.logical_x
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("[[{},{}]]", self.n(), self.k()))
    }

    fn check_scan(&self) -> Result<()> {
        if self.n() > MAX_SCAN_QUBITS {
            return Err(Error::TooLarge {
                what: "code",
                size: self.n(),
                limit: MAX_SCAN_QUBITS,
            });
        }
        Ok(())
    }

    pub fn is_normalizer(&self, p: &Pauli) -> bool {
        p.n() == self.n() && self.gens().iter().all(|g| g.commutes_with(p))
    }

    /// Validates `p ∈ N(S) \ S`.
    pub fn check_logical(&self, p: &Pauli) -> Result<()> {
        if p.n() != self.n() {
            return Err(Error::LengthMismatch(self.n(), p.n()));
        }
        if !self.is_normalizer(p) {
            return Err(Error::NotNormalizer(p.to_string()));
        }
        if self.stabilizer.contains_up_to_sign(p) {
            return Err(Error::InStabilizer(p.to_string()));
        }
        Ok(())
    }

    /// Logical coset label of a normalizer element: bit `i` set when it
    /// anticommutes with `Z̄_i` (an X̄_i factor), bit `k+i` for `X̄_i`.
    pub fn coset_id(&self, p: &Pauli) -> u32 {
        let k = self.k();
        let mut id = 0u32;
        for i in 0..k {
            if !p.commutes_with(&self.logical_z[i]) {
                id |= 1 << i;
            }
            if !p.commutes_with(&self.logical_x[i]) {
                id |= 1 << (k + i);
            }
        }
        id
    }

    /// Logical operator for a single-letter pattern on a k=1 code.
    pub fn logical(&self, letter: char) -> Result<Pauli> {
        if self.k() != 1 {
            return Err(Error::Unsupported("logical letters need k = 1".into()));
        }
        let (z, x) = (self.logical_z[0], self.logical_x[0]);
        match letter {
            'Z' => Ok(z),
            'X' => Ok(x),
            // Y = i X Z
            'Y' => Ok((x * z).times_i(1)),
            _ => Err(Error::Parse(format!("logical letter {letter:?}"))),
        }
    }

    /// Minimum weight over `N(S) \ S`.
    pub fn distance(&self) -> Result<usize> {
        self.check_scan()?;
        let span = self.stabilizer.span();
        for w in 1..=self.n() {
            let mut found = false;
            for_each_weight(self.n(), w, |p| {
                if !found && self.is_normalizer(&p) && !span.contains_up_to_phase(&p) {
                    found = true;
                }
            });
            if found {
                return Ok(w);
            }
        }
        Err(Error::InvalidCode("no logical operator found".into()))
    }

    fn min_stabilizer_weight(&self) -> Result<usize> {
        Ok(self
            .stabilizer
            .elements()?
            .skip(1)
            .map(|g| g.weight())
            .min()
            .unwrap_or(usize::MAX))
    }

    pub fn has_weight_two_stabilizer(&self) -> Result<bool> {
        Ok(self.stabilizer.elements()?.any(|g| g.weight() == 2))
    }

    /// No nontrivial stabilizer element of weight below the distance.
    pub fn is_nondegenerate(&self) -> Result<bool> {
        Ok(self.min_stabilizer_weight()? >= self.distance()?)
    }

    /// X-type and Z-type generating sets when the group is CSS.
    pub fn css_split(&self) -> Result<Option<(Vec<Pauli>, Vec<Pauli>)>> {
        let mut xs = Span::new();
        let mut zs = Span::new();
        let (mut hx, mut hz) = (Vec::new(), Vec::new());
        for g in self.stabilizer.elements()?.skip(1) {
            if g.z_bits() == 0 && xs.insert(g) {
                hx.push(g);
            }
            if g.x_bits() == 0 && zs.insert(g) {
                hz.push(g);
            }
        }
        if hx.len() + hz.len() == self.stabilizer.rank() {
            Ok(Some((hx, hz)))
        } else {
            Ok(None)
        }
    }

    pub fn is_css(&self) -> Result<bool> {
        Ok(self.css_split()?.is_some())
    }

    pub fn apply_local_clifford(&self, lc: &LocalClifford) -> Result<Self> {
        if lc.n() != self.n() {
            return Err(Error::LengthMismatch(self.n(), lc.n()));
        }
        let map = |v: &[Pauli]| v.iter().map(|p| lc.conjugate(p)).collect::<Vec<_>>();
        let mut out = StabilizerCode::new(map(self.gens()), map(&self.logical_z), map(&self.logical_x))?;
        out.name = self.name.clone();
        out.declared_distance = self.declared_distance;
        Ok(out)
    }

    /// Relabels qubit `i` as `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let map = |v: &[Pauli]| v.iter().map(|p| permute_pauli(p, perm)).collect::<Vec<_>>();
        StabilizerCode::new(map(self.gens()), map(&self.logical_z), map(&self.logical_x))
    }

    /// True when both codes have the same stabilizer group, signs included.
    pub fn same_stabilizer(&self, other: &StabilizerCode) -> bool {
        self.n() == other.n()
            && self.stabilizer.rank() == other.stabilizer.rank()
            && other.gens().iter().all(|g| self.stabilizer.contains(g))
    }

    /// Local Clifford taking `p` to a positive Z-type operator on its support.
    pub fn z_form(&self, p: &Pauli) -> Result<(LocalClifford, StabilizerCode)> {
        self.check_logical(p)?;
        let lc = z_form_layer(p);
        let code = self.apply_local_clifford(&lc)?;
        Ok((lc, code))
    }

    /// Every element of `N(S) \ S` up to `max_weight`, with its coset label.
    pub fn normalizer_scan(&self, max_weight: usize) -> Result<Vec<(Pauli, usize, u32)>> {
        self.check_scan()?;
        let span = self.stabilizer.span();
        let mut out = Vec::new();
        for w in 1..=max_weight.min(self.n()) {
            for_each_weight(self.n(), w, |p| {
                if self.is_normalizer(&p) && !span.contains_up_to_phase(&p) {
                    out.push((p, w, self.coset_id(&p)));
                }
            });
        }
        Ok(out)
    }

    /// All normalizer elements outside S, one per symplectic vector.
    pub fn all_logicals(&self) -> Result<Vec<Pauli>> {
        self.check_scan()?;
        let mut reps = Vec::new();
        let k = self.k();
        for id in 1u32..(1 << (2 * k)) {
            let mut rep = Pauli::identity(self.n());
            for i in 0..k {
                if id >> i & 1 == 1 {
                    rep = rep * self.logical_x[i];
                }
                if id >> (k + i) & 1 == 1 {
                    rep = rep * self.logical_z[i];
                }
            }
            reps.push(rep.unsigned());
        }
        let mut out = Vec::new();
        for g in self.stabilizer.elements()? {
            for r in &reps {
                out.push((*r * g).unsigned());
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(n) = &self.name {
            writeln!(s, "NAME {n}").unwrap();
        }
        if let Some(d) = self.declared_distance {
            writeln!(s, "DISTANCE {d}").unwrap();
        }
        s.push_str("STABILIZER\n");
        for g in self.gens() {
            writeln!(s, "{g}").unwrap();
        }
        s.push_str("LOGICAL_Z\n");
        for l in &self.logical_z {
            writeln!(s, "{l}").unwrap();
        }
        s.push_str("LOGICAL_X\n");
        for l in &self.logical_x {
            writeln!(s, "{l}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<&str, Vec<Pauli>> = BTreeMap::new();
        let mut current: Option<&str> = None;
        let mut name = None;
        let mut distance = None;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            match head {
                "NAME" => name = words.next().map(str::to_string),
                "DISTANCE" => {
                    let d = words.next().ok_or_else(|| Error::Parse("DISTANCE needs a value".into()))?;
                    distance = Some(d.parse().map_err(|_| Error::Parse(format!("bad distance {d:?}")))?);
                }
                "STABILIZER" | "LOGICAL_Z" | "LOGICAL_X" => current = Some(head),
                _ => {
                    let sec = current.ok_or_else(|| Error::Parse(format!("operator outside a section: {line}")))?;
                    sections.entry(sec).or_default().push(line.parse()?);
                }
            }
        }
        let take = |k: &str| sections.get(k).cloned().unwrap_or_default();
        let mut code = StabilizerCode::new(take("STABILIZER"), take("LOGICAL_Z"), take("LOGICAL_X"))?;
        code.name = name;
        code.declared_distance = distance;
        if let Some(d) = distance {
            if code.n() <= MAX_SCAN_QUBITS && code.distance()? != d {
                return Err(Error::InvalidCode(format!("declared distance {d} does not match")));
            }
        }
        Ok(code)
    }

    /// Builtin name or path to a code-definition file.
    pub fn load(spec: &str) -> Result<Self> {
        if BUILTINS.contains(&spec) {
            return Self::builtin(spec);
        }
        let text = std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
        Self::from_text(&text)
    }
}

/// Per-qubit lowest-index Clifford mapping each letter of `p` to `+Z`,
/// with the first support qubit switched to a `-Z` map if the overall sign
/// comes out negative.
pub fn z_form_layer(p: &Pauli) -> LocalClifford {
    let n = p.n();
    let mut lc = LocalClifford::identity(n);
    let target = |q: usize, neg: bool| {
        let letter = Pauli::single(1, 0, p.letter(q));
        let want = if neg { Pauli::single(1, 0, 'Z').negated() } else { Pauli::single(1, 0, 'Z') };
        Clifford1::all().find(|c| c.conjugate(&letter, 0) == want).unwrap()
    };
    let support = p.support();
    for &q in &support {
        lc.0[q] = target(q, false);
    }
    if lc.conjugate(p).is_negative() {
        if let Some(&q) = support.first() {
            lc.0[q] = target(q, true);
        }
    }
    lc
}

pub fn permute_pauli(p: &Pauli, perm: &[usize]) -> Pauli {
    let (mut x, mut z) = (0u64, 0u64);
    for q in 0..p.n() {
        x |= ((p.x_bits() >> q) & 1) << perm[q];
        z |= ((p.z_bits() >> q) & 1) << perm[q];
    }
    // Relabelling preserves the operator, so the sign is unchanged.
    Pauli::from_bits(p.n(), x, z, p.raw_phase())
}

/// `CZ(a,b) · p · CZ(a,b)` with exact phase.
pub fn conjugate_cz(p: &Pauli, a: usize, b: usize) -> Pauli {
    let xa = (p.x_bits() >> a) & 1;
    let xb = (p.x_bits() >> b) & 1;
    let z = p.z_bits() ^ (xa << b) ^ (xb << a);
    Pauli::from_bits(p.n(), p.x_bits(), z, p.raw_phase() + 2 * (xa & xb) as u8)
}

/// `CX(c→t) · p · CX(c→t)` with exact phase.
pub fn conjugate_cx(p: &Pauli, c: usize, t: usize) -> Pauli {
    // Images of X_c, Z_c, X_t, Z_t multiplied in canonical order.
    let n = p.n();
    let xc = (p.x_bits() >> c) & 1 == 1;
    let zc = (p.z_bits() >> c) & 1 == 1;
    let xt = (p.x_bits() >> t) & 1 == 1;
    let zt = (p.z_bits() >> t) & 1 == 1;
    let keep = !((1u64 << c) | (1u64 << t));
    let rest = Pauli::from_bits(n, p.x_bits() & keep, p.z_bits() & keep, p.raw_phase());
    let mut out = Pauli::identity(n);
    if xc {
        out = out * Pauli::x_on(n, &[c, t]);
    }
    if zc {
        out = out * Pauli::z_on(n, &[c]);
    }
    if xt {
        out = out * Pauli::x_on(n, &[t]);
    }
    if zt {
        out = out * Pauli::z_on(n, &[c, t]);
    }
    // `rest` is disjoint from {c, t}, so the product carries its phase over.
    out * rest
}

/// Calls `f` on every Hermitian Pauli of weight exactly `w` (sign `+`).
pub fn for_each_weight(n: usize, w: usize, mut f: impl FnMut(Pauli)) {
    if w > n {
        return;
    }
    if w == 0 {
        f(Pauli::identity(n));
        return;
    }
    let mut m: u64 = (1u64 << w) - 1;
    let limit = 1u64 << n;
    while m < limit {
        let qs = bits(m);
        for mut code in 0..3usize.pow(w as u32) {
            let mut p = Pauli::identity(n);
            for &q in &qs {
                let letter = ['X', 'Y', 'Z'][code % 3];
                code /= 3;
                p = p * Pauli::single(n, q, letter);
            }
            f(p);
        }
        // Gosper's hack: next mask with the same popcount.
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
}

/// A permutation `π` with `P_π H^⊗n` preserving the code and swapping the
/// logical Z and X classes; returned 0-based.
pub fn hadamard_permutation(code: &StabilizerCode) -> Option<Vec<usize>> {
    let n = code.n();
    let h = LocalClifford(vec![Clifford1::by_name("H").unwrap(); n]);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut found = None;
    permutations(&mut perm, 0, &mut |pi| {
        if found.is_some() {
            return;
        }
        let map = |p: &Pauli| permute_pauli(&h.conjugate(p), pi);
        if !code.gens().iter().all(|g| code.stabilizer().contains(&map(g))) {
            return;
        }
        let zx = code.stabilizer().contains_up_to_sign(&(map(&code.logical_z()[0]) * code.logical_x()[0]));
        let xz = code.stabilizer().contains_up_to_sign(&(map(&code.logical_x()[0]) * code.logical_z()[0]));
        if zx && xz {
            found = Some(pi.to_vec());
        }
    });
    found
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Pauli {
        s.parse().unwrap()
    }

    #[test]
    fn builtins_are_valid_and_have_declared_distance() {
        for name in BUILTINS {
            let c = StabilizerCode::builtin(name).unwrap();
            assert_eq!(c.distance().unwrap(), c.declared_distance.unwrap(), "{name}");
        }
        assert!(StabilizerCode::builtin("surface").is_err());
    }

    #[test]
    fn five_prime_is_local_clifford_image_of_five() {
        let five = StabilizerCode::builtin("five").unwrap();
        let lc = LocalClifford::parse_sparse(5, "K1 Y3 K5").unwrap();
        let got = five.apply_local_clifford(&lc).unwrap();
        let want = StabilizerCode::builtin("five_prime").unwrap();
        // generator lists match one for one, signs included
        assert_eq!(got.gens(), want.gens());
        assert_eq!(got.logical_z(), want.logical_z());
        assert_eq!(got.logical_x(), want.logical_x());
        let back = got.apply_local_clifford(&lc.inverse()).unwrap();
        assert_eq!(back, five);
        assert_eq!(five.apply_local_clifford(&LocalClifford::identity(5)).unwrap(), five);
    }

    #[test]
    fn structural_properties() {
        let five = StabilizerCode::builtin("five").unwrap();
        let steane = StabilizerCode::builtin("steane7").unwrap();
        let shor = StabilizerCode::builtin("shor9").unwrap();
        assert!(!five.has_weight_two_stabilizer().unwrap());
        assert!(five.is_nondegenerate().unwrap());
        assert!(shor.has_weight_two_stabilizer().unwrap());
        assert!(!shor.is_nondegenerate().unwrap());
        assert!(steane.is_nondegenerate().unwrap());
        assert!(steane.is_css().unwrap());
        assert!(shor.is_css().unwrap());
        assert!(!five.is_css().unwrap());
        let (hx, hz) = steane.css_split().unwrap().unwrap();
        assert_eq!((hx.len(), hz.len()), (3, 3));
    }

    #[test]
    fn k_transversal_on_five() {
        let five = StabilizerCode::builtin("five").unwrap();
        let k = LocalClifford(vec![Clifford1::by_name("K").unwrap(); 5]);
        let image = five.apply_local_clifford(&k).unwrap();
        assert!(five.same_stabilizer(&image));
    }

    #[test]
    fn z_form_examples() {
        let five = StabilizerCode::builtin("five").unwrap();
        for s in ["-XIZIX", "-YIXIY"] {
            let (lc, code) = five.z_form(&p(s)).unwrap();
            let img = lc.conjugate(&p(s));
            assert_eq!(img, Pauli::z_on(5, &[0, 2, 4]));
            assert!(code.is_normalizer(&img));
        }
        let (lc, _) = five.z_form(&p("-XIZIX")).unwrap();
        assert_eq!(lc.0[4], Clifford1::by_name("H").unwrap());
        assert_eq!(lc.0[0].conjugate(&p("X"), 0), p("-Z"));
        let prime = StabilizerCode::builtin("five_prime").unwrap();
        let (lc, _) = prime.z_form(&p("ZIZIZ")).unwrap();
        assert!(lc.is_identity());
        assert!(matches!(five.z_form(&p("ZZXIX")), Err(Error::InStabilizer(_))));
        assert!(matches!(five.z_form(&p("ZIIII")), Err(Error::NotNormalizer(_))));
    }

    #[test]
    fn normalizer_scans() {
        let five = StabilizerCode::builtin("five").unwrap();
        let scan = five.normalizer_scan(3).unwrap();
        let zc = five.coset_id(&p("-XIZIX"));
        let xc = five.coset_id(&p("-YIXIY"));
        assert!(scan.iter().any(|(q, _, id)| q.same_up_to_phase(&p("XIZIX")) && *id == zc));
        assert!(scan.iter().any(|(q, _, id)| q.same_up_to_phase(&p("YIXIY")) && *id == xc));
        let steane = StabilizerCode::builtin("steane7").unwrap();
        let scan = steane.normalizer_scan(3).unwrap();
        assert!(scan.iter().any(|(q, _, _)| *q == p("IIIIZZZ")));
        assert!(scan.iter().any(|(q, _, _)| *q == p("IIIIXXX")));
        let shor = StabilizerCode::builtin("shor9").unwrap();
        let scan = shor.normalizer_scan(3).unwrap();
        let z147 = Pauli::z_on(9, &[0, 3, 6]);
        let hit = scan.iter().find(|(q, _, _)| *q == z147).unwrap();
        assert_eq!(hit.2, shor.coset_id(&shor.logical_x()[0]));
        // every weight-3 Paulis count checked against the binomial formula
        let mut count = 0;
        for_each_weight(9, 3, |_| count += 1);
        assert_eq!(count, 84 * 27);
    }

    #[test]
    fn text_format_round_trip() {
        for name in BUILTINS {
            let c = StabilizerCode::builtin(name).unwrap();
            let back = StabilizerCode::from_text(&c.to_text()).unwrap();
            assert_eq!(back, c);
        }
        assert!(StabilizerCode::from_text("STABILIZER\nXX\nZZ\nLOGICAL_Z\nZI\nLOGICAL_X\nXI\n").is_err());
    }

    #[test]
    fn five_code_hadamard_permutation_exists() {
        let five = StabilizerCode::builtin("five").unwrap();
        let pi = hadamard_permutation(&five).expect("permutation");
        assert_eq!(pi.len(), 5);
        assert_eq!(pi, vec![0, 2, 4, 1, 3]);
    }

    #[test]
    fn cz_and_cx_conjugation_match_dense_action() {
        // CZ(XX)CZ = (XZ)(ZX) = YY; CX: X_c -> X_c X_t, Z_t -> Z_c Z_t, Y_c -> Y_c X_t
        assert_eq!(conjugate_cz(&p("XX"), 0, 1), p("YY"));
        assert_eq!(conjugate_cz(&p("XI"), 0, 1), p("XZ"));
        assert_eq!(conjugate_cx(&p("XI"), 0, 1), p("XX"));
        assert_eq!(conjugate_cx(&p("IZ"), 0, 1), p("ZZ"));
        assert_eq!(conjugate_cx(&p("YI"), 0, 1), p("YX"));
        assert_eq!(conjugate_cx(&p("IY"), 0, 1), p("ZY"));
        for s in ["XY", "YZ", "ZY", "YY"] {
            let q = p(s);
            assert_eq!(conjugate_cx(&conjugate_cx(&q, 0, 1), 0, 1), q);
            assert_eq!(conjugate_cz(&conjugate_cz(&q, 0, 1), 0, 1), q);
        }
    }
}
