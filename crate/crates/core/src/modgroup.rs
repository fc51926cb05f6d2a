//! Integer matrix group machinery for `SL2(Z)` and `Gamma0(N)`.
//!
//! Elements are kept as exact integer matrices; `-M` and `M` are distinct
//! elements. The Möbius action is blind to the sign, the multiplier
//! extension in [`crate::automorphy`] is not.
//!
//! `Gamma0(N)` is handled through its right cosets in `SL2(Z)`: a coset is
//! determined by the bottom row `(c : d)` in `P^1(Z/N)`, a prefix-closed
//! transversal is found by breadth-first search over `S` and `T`, and the
//! Schreier generators `r g rep(r g)^{-1}` generate the subgroup. Word
//! decomposition for `Gamma0(N)` rewrites the `SL2(Z)` continued-fraction word
//! along the transversal.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A unimodular 2x2 integer matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct GroupElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl TryFrom<[i64; 4]> for GroupElement {
    type Error = Error;

    fn try_from(m: [i64; 4]) -> Result<Self> {
        GroupElement::new(m[0], m[1], m[2], m[3])
    }
}

impl From<GroupElement> for [i64; 4] {
    fn from(m: GroupElement) -> Self {
        [m.a, m.b, m.c, m.d]
    }
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 1, b: 0, c: 0, d: 1 };
    pub const MINUS_IDENTITY: GroupElement = GroupElement { a: -1, b: 0, c: 0, d: -1 };
    /// The translation `z -> z + 1`.
    pub const S: GroupElement = GroupElement { a: 1, b: 1, c: 0, d: 1 };
    /// The inversion `z -> -1/z`.
    pub const T: GroupElement = GroupElement { a: 0, b: -1, c: 1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(Error::Determinant { a, b, c, d, det });
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn translation(n: i64) -> Self {
        GroupElement { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn multiply(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn negate(&self) -> GroupElement {
        GroupElement { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn pow(&self, n: i64) -> GroupElement {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = GroupElement::IDENTITY;
        for _ in 0..n.unsigned_abs() {
            acc = acc.multiply(&base);
        }
        acc
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == GroupElement::IDENTITY
    }

    /// Upper triangular with `c = 0`, i.e. `±` a translation.
    pub fn fixes_infinity(&self) -> bool {
        self.c == 0
    }

    /// Parabolic: `|a + d| = 2` and not `±I`.
    pub fn is_parabolic(&self) -> bool {
        self.trace().abs() == 2 && *self != GroupElement::IDENTITY && *self != GroupElement::MINUS_IDENTITY
    }

    /// `mu(V) = a^2 + b^2 + c^2 + d^2`.
    pub fn mu(&self) -> i64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    /// The automorphy factor `cz + d`.
    pub fn j(&self, z: Complex64) -> Complex64 {
        z * self.c as f64 + self.d as f64
    }

    /// Möbius action `(az + b)/(cz + d)` on the upper half-plane.
    pub fn act(&self, z: Complex64) -> Complex64 {
        (z * self.a as f64 + self.b as f64) / self.j(z)
    }

    /// Möbius action on the boundary `P^1(Q)`.
    pub fn act_cusp(&self, q: Cusp) -> Cusp {
        match q {
            Cusp::Infinity => Cusp::new(self.a, self.c),
            Cusp::Rational(p, r) => Cusp::new(self.a * p + self.b * r, self.c * p + self.d * r),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.multiply(&rhs)
    }
}

/// A point of `P^1(Q)`: infinity or a reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cusp {
    Infinity,
    Rational(i64, i64),
}

impl Cusp {
    /// The point `p/q`, reduced; `q = 0` gives infinity.
    pub fn new(p: i64, q: i64) -> Cusp {
        if q == 0 {
            return Cusp::Infinity;
        }
        let g = gcd(p, q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 {
            p = -p;
            q = -q;
        }
        Cusp::Rational(p, q)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Cusp::Infinity)
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            Cusp::Infinity => None,
            Cusp::Rational(p, q) => Some(*p as f64 / *q as f64),
        }
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cusp::Infinity => write!(f, "inf"),
            Cusp::Rational(p, 1) => write!(f, "{p}"),
            Cusp::Rational(p, q) => write!(f, "{p}/{q}"),
        }
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: returns `(g, x, y)` with `x*a + y*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// An element of `SL2(Z)` with bottom row `(c, d)`, `gcd(c, d) = 1`.
///
/// The top row is reduced so that `|a| <= |c|/2` when `c != 0`.
pub fn complete_bottom_row(c: i64, d: i64) -> Option<GroupElement> {
    let (g, x, y) = ext_gcd(d, c);
    if g != 1 {
        return None;
    }
    // x*d + y*c = 1  =>  a = x, b = -y
    let (mut a, mut b) = (x, -y);
    if c != 0 {
        let t = (a as f64 / c as f64).round() as i64;
        a -= t * c;
        b -= t * d;
    }
    Some(GroupElement { a, b, c, d })
}

/// Which subgroup of `SL2(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    Full,
    Gamma0(i64),
}

impl GroupKind {
    pub fn level(&self) -> i64 {
        match self {
            GroupKind::Full => 1,
            GroupKind::Gamma0(n) => *n,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Full => write!(f, "SL2Z"),
            GroupKind::Gamma0(n) => write!(f, "Gamma0({n})"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    /// `"SL2Z"` or `"Gamma0(N)"` with `N` a positive decimal integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "SL2Z" {
            return Ok(GroupKind::Full);
        }
        let inner = s
            .strip_prefix("Gamma0(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unknown group `{s}`, expected SL2Z or Gamma0(N)")))?;
        if inner.is_empty() || !inner.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("invalid level `{inner}` in `{s}`")));
        }
        let n: i64 = inner
            .parse()
            .map_err(|_| Error::Parse(format!("invalid level `{inner}` in `{s}`")))?;
        if n < 1 {
            return Err(Error::Parse(format!("level must be positive in `{s}`")));
        }
        Ok(GroupKind::Gamma0(n))
    }
}

#[derive(Clone, Debug)]
struct CosetTable {
    reps: Vec<GroupElement>,
    /// transition[r][g] = class of reps[r] * gen_g, g in {S, T}
    forward: Vec<[usize; 2]>,
    /// backward[r][g] = class of reps[r] * gen_g^{-1}
    backward: Vec<[usize; 2]>,
    /// schreier[r][g] = generator index and sign of reps[r] g reps[forward]^{-1}
    schreier: Vec<[Option<(usize, i32)>; 2]>,
}

/// A finite-index subgroup with an explicit generating set.
#[derive(Clone, Debug)]
pub struct SubgroupDescriptor {
    kind: GroupKind,
    generators: Vec<GroupElement>,
    names: Vec<String>,
    width: i64,
    cosets: Option<CosetTable>,
}

impl SubgroupDescriptor {
    pub fn sl2z() -> Self {
        SubgroupDescriptor {
            kind: GroupKind::Full,
            generators: vec![GroupElement::S, GroupElement::T],
            names: vec!["S".into(), "T".into()],
            width: 1,
            cosets: None,
        }
    }

    pub fn gamma0(n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(format!("level must be positive, got {n}")));
        }
        if n == 1 {
            let mut g = Self::sl2z();
            g.kind = GroupKind::Gamma0(1);
            return Ok(g);
        }
        Ok(build_gamma0(n))
    }

    pub fn from_kind(kind: GroupKind) -> Result<Self> {
        match kind {
            GroupKind::Full => Ok(Self::sl2z()),
            GroupKind::Gamma0(n) => Self::gamma0(n),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn level(&self) -> i64 {
        self.kind.level()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The translation generator `[[1, width], [0, 1]]`.
    pub fn translation(&self) -> GroupElement {
        GroupElement::translation(self.width)
    }

    pub fn translation_width(&self) -> i64 {
        self.width
    }

    pub fn contains(&self, m: &GroupElement) -> bool {
        m.c.rem_euclid(self.level()) == 0
    }

    /// `[SL2(Z) : G]`.
    pub fn index(&self) -> usize {
        self.cosets.as_ref().map_or(1, |t| t.reps.len())
    }

    /// Right coset representatives of `G \ SL2(Z)`, the identity first.
    pub fn right_coset_reps(&self) -> Vec<GroupElement> {
        self.cosets
            .as_ref()
            .map_or_else(|| vec![GroupElement::IDENTITY], |t| t.reps.clone())
    }

    /// Write `m` as a product of generator powers, exact including sign.
    pub fn word_decompose(&self, m: &GroupElement) -> Result<Vec<(usize, i64)>> {
        if !self.contains(m) {
            return Err(Error::NotInGroup { element: *m, group: self.kind.to_string() });
        }
        let letters = continued_fraction_word(m);
        let Some(table) = &self.cosets else {
            return Ok(letters);
        };
        let mut out: Vec<(usize, i64)> = Vec::new();
        let mut cur = 0usize;
        for (g, e) in letters {
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    if let Some((idx, sign)) = table.schreier[cur][g] {
                        push_letter(&mut out, idx, sign as i64);
                    }
                    cur = table.forward[cur][g];
                } else {
                    let prev = table.backward[cur][g];
                    if let Some((idx, sign)) = table.schreier[prev][g] {
                        push_letter(&mut out, idx, -(sign as i64));
                    }
                    cur = prev;
                }
            }
        }
        debug_assert_eq!(cur, 0);
        Ok(out)
    }

    /// Multiply out a word in the generators.
    pub fn evaluate_word(&self, word: &[(usize, i64)]) -> GroupElement {
        word.iter()
            .fold(GroupElement::IDENTITY, |acc, &(g, e)| acc * self.generators[g].pow(e))
    }

    /// A uniformly random word of `length` generator letters with exponent `±1`.
    pub fn random_word<R: Rng>(&self, rng: &mut R, length: usize) -> (Vec<(usize, i64)>, GroupElement) {
        let mut word = Vec::with_capacity(length);
        for _ in 0..length {
            let g = rng.gen_range(0..self.generators.len());
            let e = if rng.gen_bool(0.5) { 1 } else { -1 };
            word.push((g, e));
        }
        let m = self.evaluate_word(&word);
        (word, m)
    }

    /// Inequivalent cusps, `∞` first, then by denominator and numerator.
    pub fn cusp_classes(&self) -> Vec<CuspData> {
        let n = self.level();
        let mut out = vec![CuspData {
            cusp: Cusp::Infinity,
            width: self.width,
            scaling: GroupElement::IDENTITY,
            generator: self.translation(),
        }];
        for c in divisors(n).into_iter().filter(|&c| c < n) {
            let gc = gcd(c, n / c);
            let mut seen = Vec::new();
            for a in 0..c.max(1) {
                if gcd(a, c) != 1 {
                    continue;
                }
                let r = a.rem_euclid(gc);
                if seen.contains(&r) {
                    continue;
                }
                seen.push(r);
                out.push(CuspData::for_rational(a, c, n));
            }
        }
        out
    }
}

fn push_letter(out: &mut Vec<(usize, i64)>, idx: usize, e: i64) {
    if let Some(last) = out.last_mut() {
        if last.0 == idx {
            last.1 += e;
            if last.1 == 0 {
                out.pop();
            }
            return;
        }
    }
    out.push((idx, e));
}

/// Continued-fraction word in `S = [[1,1],[0,1]]` (index 0) and
/// `T = [[0,-1],[1,0]]` (index 1).
fn continued_fraction_word(m: &GroupElement) -> Vec<(usize, i64)> {
    let mut word = Vec::new();
    let mut cur = *m;
    // cur = S^q T cur'  with  cur' = T^{-1} S^{-q} cur
    while cur.c != 0 {
        let q = cur.a.div_euclid(cur.c);
        if q != 0 {
            push_letter(&mut word, 0, q);
        }
        push_letter(&mut word, 1, 1);
        let r = cur.a - q * cur.c;
        let s = cur.b - q * cur.d;
        cur = GroupElement { a: cur.c, b: cur.d, c: -r, d: -s };
    }
    if cur.a == 1 {
        if cur.b != 0 {
            push_letter(&mut word, 0, cur.b);
        }
    } else {
        // cur = -[[1, -b], [0, 1]] = T^2 S^{-b}
        push_letter(&mut word, 1, 2);
        if cur.b != 0 {
            push_letter(&mut word, 0, -cur.b);
        }
    }
    word
}

fn build_gamma0(n: i64) -> SubgroupDescriptor {
    // canonical class of every pair mod N; scaling by units identifies points of P^1(Z/N)
    let units: Vec<i64> = (1..n).filter(|&u| gcd(u, n) == 1).collect();
    let mut class_of: HashMap<(i64, i64), usize> = HashMap::new();
    let gens = [GroupElement::S, GroupElement::T];

    let mut reps = vec![GroupElement::IDENTITY];
    let register = |m: &GroupElement, idx: usize, class_of: &mut HashMap<(i64, i64), usize>| {
        let (c, d) = (m.c.rem_euclid(n), m.d.rem_euclid(n));
        for &u in &units {
            class_of.insert(((u * c) % n, (u * d) % n), idx);
        }
    };
    register(&GroupElement::IDENTITY, 0, &mut class_of);
    let mut head = 0;
    while head < reps.len() {
        let r = reps[head];
        for g in &gens {
            let rg = r * *g;
            let key = (rg.c.rem_euclid(n), rg.d.rem_euclid(n));
            if !class_of.contains_key(&key) {
                let idx = reps.len();
                reps.push(rg);
                register(&rg, idx, &mut class_of);
            }
        }
        head += 1;
    }

    let class = |m: &GroupElement, class_of: &HashMap<(i64, i64), usize>| {
        class_of[&(m.c.rem_euclid(n), m.d.rem_euclid(n))]
    };
    let forward: Vec<[usize; 2]> = reps
        .iter()
        .map(|r| [class(&(*r * gens[0]), &class_of), class(&(*r * gens[1]), &class_of)])
        .collect();
    let backward: Vec<[usize; 2]> = reps
        .iter()
        .map(|r| {
            [
                class(&(*r * gens[0].inverse()), &class_of),
                class(&(*r * gens[1].inverse()), &class_of),
            ]
        })
        .collect();

    let mut generators: Vec<GroupElement> = Vec::new();
    let mut index_of: HashMap<GroupElement, (usize, i32)> = HashMap::new();
    let mut schreier = vec![[None, None]; reps.len()];
    for (ri, r) in reps.iter().enumerate() {
        for (gi, g) in gens.iter().enumerate() {
            let s = *r * *g * reps[forward[ri][gi]].inverse();
            if s.is_identity() {
                continue;
            }
            let entry = if let Some(&e) = index_of.get(&s) {
                e
            } else if let Some(&(idx, sign)) = index_of.get(&s.inverse()) {
                (idx, -sign)
            } else {
                let idx = generators.len();
                generators.push(s);
                index_of.insert(s, (idx, 1));
                (idx, 1)
            };
            schreier[ri][gi] = Some(entry);
        }
    }
    let names = (0..generators.len())
        .map(|i| if generators[i] == GroupElement::S { "S".to_string() } else { format!("g{i}") })
        .collect();

    SubgroupDescriptor {
        kind: GroupKind::Gamma0(n),
        generators,
        names,
        width: 1,
        cosets: Some(CosetTable { reps, forward, backward, schreier }),
    }
}

pub fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// One inequivalent cusp and its local data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspData {
    pub cusp: Cusp,
    /// Classical width: the translation length of the stabilizer after scaling.
    pub width: i64,
    /// Integral scaling matrix `A` with `A(cusp) = ∞`.
    pub scaling: GroupElement,
    /// Generator `A^{-1} [[1, width], [0, 1]] A` of the stabilizer (trace +2).
    pub generator: GroupElement,
}

impl CuspData {
    fn for_rational(a: i64, c: i64, n: i64) -> CuspData {
        let width = n / gcd(c * c, n);
        // g = [[a, b], [c, d]] with g(∞) = a/c; x*a + y*c = 1 gives d = x, b = -y
        let (_, x, y) = ext_gcd(a, c);
        let g = GroupElement { a, b: -y, c, d: x };
        let generator = g * GroupElement::translation(width) * g.inverse();
        CuspData { cusp: Cusp::new(a, c), width, scaling: g.inverse(), generator }
    }
}

/// Exactly one representative per coset of `±Γ∞ \ G` with `c^2 + d^2 <= bound`,
/// normalized `c > 0` or `(c, d) = (0, 1)`, sorted by `(c^2 + d^2, c, d)`.
pub fn coset_reps_mod_translations(g: &SubgroupDescriptor, bound: u64) -> Vec<GroupElement> {
    let n = g.level();
    let bound = bound as i64;
    let mut reps = vec![GroupElement::IDENTITY];
    let cmax = (bound as f64).sqrt().floor() as i64 + 1;
    let mut c = n;
    while c <= cmax {
        let rem = bound - c * c;
        if rem >= 0 {
            let dmax = (rem as f64).sqrt().floor() as i64 + 1;
            for d in -dmax..=dmax {
                if c * c + d * d > bound || gcd(c, d) != 1 {
                    continue;
                }
                if let Some(m) = complete_bottom_row(c, d) {
                    reps.push(m);
                }
            }
        }
        c += n;
    }
    reps.sort_by_key(|m| (m.c * m.c + m.d * m.d, m.c, m.d));
    reps
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::new(a, b, c, d).unwrap()
    }

    #[test]
    fn multiply_examples() {
        let i = GroupElement::IDENTITY;
        assert_eq!(i * i, i);
        assert_eq!(GroupElement::S * GroupElement::S, m(1, 2, 0, 1));
        assert_eq!(GroupElement::T * GroupElement::T, m(-1, 0, 0, -1));
    }

    #[test]
    fn bad_determinant_rejected() {
        assert!(matches!(GroupElement::new(1, 1, 1, 1), Err(Error::Determinant { det: 0, .. })));
    }

    #[test]
    fn act_examples() {
        let i = Complex64::i();
        assert!((GroupElement::S.act(i) - Complex64::new(1.0, 1.0)).norm() < 1e-15);
        assert!((GroupElement::T.act(i) - i).norm() < 1e-15);
        assert!((GroupElement::T.act(2.0 * i) - 0.5 * i).norm() < 1e-15);
        assert_eq!(GroupElement::T.act_cusp(Cusp::Rational(0, 1)), Cusp::Infinity);
        assert_eq!(GroupElement::T.act_cusp(Cusp::Infinity), Cusp::Rational(0, 1));
    }

    #[test]
    fn parabolic_examples() {
        assert!(m(1, 5, 0, 1).is_parabolic());
        assert!(!GroupElement::T.is_parabolic());
        assert!(!GroupElement::IDENTITY.is_parabolic());
        assert!(!GroupElement::MINUS_IDENTITY.is_parabolic());
    }

    #[test]
    fn mu_examples() {
        assert_eq!(GroupElement::IDENTITY.mu(), 2);
        assert_eq!(GroupElement::S.mu(), 3);
        assert_eq!(m(2, 1, 1, 1).mu(), 7);
    }

    #[test]
    fn word_examples() {
        let g = SubgroupDescriptor::sl2z();
        assert!(g.word_decompose(&GroupElement::IDENTITY).unwrap().is_empty());
        assert_eq!(g.word_decompose(&m(1, 3, 0, 1)).unwrap(), vec![(0, 3)]);
        let x = m(2, 1, 1, 1);
        let w = g.word_decompose(&x).unwrap();
        assert_eq!(g.evaluate_word(&w), x);
        let w = g.word_decompose(&GroupElement::MINUS_IDENTITY).unwrap();
        assert_eq!(g.evaluate_word(&w), GroupElement::MINUS_IDENTITY);
    }

    #[test]
    fn gamma0_membership_failure() {
        let g = SubgroupDescriptor::gamma0(4).unwrap();
        assert!(matches!(g.word_decompose(&GroupElement::T), Err(Error::NotInGroup { .. })));
    }

    #[test]
    fn gamma0_words_recompose() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 4, 6, 11] {
            let g = SubgroupDescriptor::gamma0(n).unwrap();
            assert_eq!(g.generators()[0], GroupElement::S);
            for gen in g.generators() {
                assert!(g.contains(gen));
            }
            for len in 0..8 {
                let (_, x) = g.random_word(&mut rng, len);
                let w = g.word_decompose(&x).unwrap();
                assert_eq!(g.evaluate_word(&w), x);
            }
        }
    }

    #[test]
    fn sl2z_reps_small_bounds() {
        let g = SubgroupDescriptor::sl2z();
        let rows = |b| {
            coset_reps_mod_translations(&g, b)
                .iter()
                .map(|m| (m.c(), m.d()))
                .collect::<Vec<_>>()
        };
        assert_eq!(rows(1), vec![(0, 1), (1, 0)]);
        assert_eq!(rows(2), vec![(0, 1), (1, 0), (1, -1), (1, 1)]);
        let g2 = SubgroupDescriptor::gamma0(2).unwrap();
        let r: Vec<_> = coset_reps_mod_translations(&g2, 1).iter().map(|m| (m.c(), m.d())).collect();
        assert_eq!(r, vec![(0, 1)]);
    }

    #[test]
    fn group_spec_strings() {
        assert_eq!("SL2Z".parse::<GroupKind>().unwrap(), GroupKind::Full);
        assert_eq!("Gamma0(11)".parse::<GroupKind>().unwrap(), GroupKind::Gamma0(11));
        assert!("Gamma0(0)".parse::<GroupKind>().is_err());
        assert!("Gamma0(-3)".parse::<GroupKind>().is_err());
        assert!("Gamma1(3)".parse::<GroupKind>().is_err());
    }

    #[test]
    fn cusp_generators_are_parabolic_and_fix_cusp() {
        for n in [1, 2, 3, 4, 6, 9, 11, 12] {
            let g = SubgroupDescriptor::gamma0(n).unwrap();
            for cd in g.cusp_classes() {
                assert!(cd.generator.is_parabolic());
                assert_eq!(cd.generator.trace(), 2);
                assert!(g.contains(&cd.generator));
                assert_eq!(cd.generator.act_cusp(cd.cusp), cd.cusp);
                assert_eq!(cd.scaling.act_cusp(cd.cusp), Cusp::Infinity);
            }
        }
    }
}
