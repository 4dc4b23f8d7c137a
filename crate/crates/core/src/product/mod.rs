//! Free products of finitely generated abelian groups.
//!
//! Every factor `G_α = Z^r ⊕ Z/d₁ ⊕ … ⊕ Z/d_s` contributes a generator pair
//! per coordinate plus one self-inverse letter per element of order two of
//! its torsion part. Each element has a canonical block string
//! `pos(g) · h · pos(g⁻¹)⁻¹` where `pos` lists the positive coordinates in
//! order and `h` is the order-two part; the inverse of a canonical string is
//! canonical, so reduced words in canonical blocks compare as strings.

mod pipeline;
mod reorder;
mod summary;

pub use pipeline::*;
pub use reorder::*;
pub use summary::*;

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{Error, Result};

/// Integer coordinates of a factor element; torsion coordinates are kept in
/// `[0, d)`.
pub type Elem = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub name: String,
    pub rank: usize,
    pub torsion: Vec<u64>,
    /// Generator letter per coordinate; `None` for coordinates of order two,
    /// which are covered by the self-inverse letters.
    pub gens: Vec<Option<Letter>>,
    /// Self-inverse letter per non-zero subset of the order-two coordinates.
    halves: BTreeMap<u64, Letter>,
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn identity(&self) -> Elem {
        vec![0; self.dim()]
    }

    fn modulus(&self, i: usize) -> Option<i64> {
        (i >= self.rank).then(|| self.torsion[i - self.rank] as i64)
    }

    pub fn normalize(&self, mut g: Elem) -> Elem {
        for (i, c) in g.iter_mut().enumerate() {
            if let Some(d) = self.modulus(i) {
                *c = c.rem_euclid(d);
            }
        }
        g
    }

    pub fn add(&self, g: &[i64], h: &[i64]) -> Elem {
        self.normalize(g.iter().zip(h).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self, g: &[i64]) -> Elem {
        self.normalize(g.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, g: &[i64], k: i64) -> Elem {
        self.normalize(g.iter().map(|a| a * k).collect())
    }

    pub fn is_identity(&self, g: &[i64]) -> bool {
        g.iter().all(|&c| c == 0)
    }

    /// Signed coordinates in `(−d/2, d/2)` and the mask of coordinates equal
    /// to `d/2`.
    fn signed(&self, g: &[i64]) -> (Vec<i64>, u64) {
        let mut mask = 0;
        let mut bit = 0;
        let mut s = Vec::with_capacity(g.len());
        for (i, &c) in g.iter().enumerate() {
            match self.modulus(i) {
                None => s.push(c),
                Some(d) => {
                    let even = d % 2 == 0;
                    if even && 2 * c == d {
                        mask |= 1 << bit;
                        s.push(0);
                    } else if 2 * c > d {
                        s.push(c - d);
                    } else {
                        s.push(c);
                    }
                    if even {
                        bit += 1;
                    }
                }
            }
        }
        (s, mask)
    }

    /// The canonical block string of `g` as runs `(letter, count)`.
    pub fn canonical_runs(&self, alphabet: &Alphabet, g: &[i64]) -> Vec<(Letter, u64)> {
        let (s, mask) = self.signed(g);
        let mut runs = Vec::new();
        for (i, &c) in s.iter().enumerate() {
            if c > 0 {
                runs.push((self.gens[i].expect("order-two coordinates have no generator"), c as u64));
            }
        }
        if mask != 0 {
            runs.push((self.halves[&mask], 1));
        }
        for (i, &c) in s.iter().enumerate().rev() {
            if c < 0 {
                runs.push((alphabet.bar(self.gens[i].unwrap()), (-c) as u64));
            }
        }
        runs
    }

    pub fn canonical(&self, alphabet: &Alphabet, g: &[i64]) -> Word {
        let mut w = Vec::new();
        for (a, k) in self.canonical_runs(alphabet, g) {
            w.extend(std::iter::repeat_n(a, k as usize));
        }
        Word(w)
    }

    /// A nontrivial element other than `h` (and other than the identity), if
    /// the factor has more than two elements.
    pub fn other_than(&self, h: &[i64]) -> Option<Elem> {
        let two = self.scale(h, 2);
        if !self.is_identity(&two) && two != h {
            return Some(two);
        }
        (0..self.dim())
            .map(|i| {
                let mut e = self.identity();
                e[i] = 1;
                self.normalize(e)
            })
            .find(|e| !self.is_identity(e) && e.as_slice() != h)
    }

    /// The first generator as an element.
    pub fn unit(&self) -> Elem {
        let mut e = self.identity();
        e[0] = 1;
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LetterInfo {
    factor: usize,
    /// Position in the canonical order of the factor's letters.
    rank: usize,
}

/// `F = ⋆_α G_α` with its generating alphabet `Γ`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProductSpec {
    pub alphabet: Alphabet,
    pub factors: Vec<Factor>,
    info: Vec<LetterInfo>,
    elems: Vec<Elem>,
}

impl ProductSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `G = Z^rank ⊕ Z/d₁ ⊕ …`. Generators are named `name` when there is
    /// exactly one, else `name1`, `name2`, …; inverses carry a macron and
    /// order-two letters are `nameh` (or `nameh<mask>` with several even
    /// moduli). `letters` overrides the generator names.
    pub fn add_factor(&mut self, name: &str, rank: usize, torsion: &[u64], letters: Option<&[&str]>) -> Result<usize> {
        if self.factors.iter().any(|f| f.name == name) {
            return Err(Error::UnknownSymbol(format!("factor {name} declared twice")));
        }
        if let Some(&d) = torsion.iter().find(|&&d| d < 2) {
            return Err(Error::UnknownSymbol(format!("torsion modulus {d} in factor {name}")));
        }
        if rank == 0 && torsion.is_empty() {
            return Err(Error::UnknownSymbol(format!("factor {name} is trivial")));
        }
        let k = self.factors.len();
        let dim = rank + torsion.len();
        let with_gen: Vec<usize> = (0..dim).filter(|&i| i < rank || torsion[i - rank] > 2).collect();
        if let Some(l) = letters {
            if l.len() != with_gen.len() {
                return Err(Error::UnknownSymbol(format!("factor {name} needs {} letter names", with_gen.len())));
            }
        }
        let mut f = Factor { name: name.into(), rank, torsion: torsion.to_vec(), gens: vec![None; dim], halves: BTreeMap::new() };
        for (n, &i) in with_gen.iter().enumerate() {
            let base = match letters {
                Some(l) => l[n].to_string(),
                None if with_gen.len() == 1 => name.to_string(),
                None => format!("{name}{}", n + 1),
            };
            let a = self.alphabet.add_pair(&base, &format!("{base}\u{304}"))?;
            let mut e = vec![0; dim];
            e[i] = 1;
            self.push_info(a, k, i, f.normalize(e.clone()));
            self.push_info(self.alphabet.bar(a), k, 2 * dim - i, f.neg(&e));
            f.gens[i] = Some(a);
        }
        let even: Vec<usize> = (rank..dim).filter(|&i| torsion[i - rank].is_multiple_of(2)).collect();
        for mask in 1u64..(1 << even.len()) {
            let hname = if even.len() == 1 { format!("{name}h") } else { format!("{name}h{mask}") };
            let a = self.alphabet.add_self_inverse(&hname)?;
            let mut e = vec![0; dim];
            for (b, &i) in even.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    e[i] = torsion[i - rank] as i64 / 2;
                }
            }
            self.push_info(a, k, dim, e);
            f.halves.insert(mask, a);
        }
        self.factors.push(f);
        Ok(k)
    }

    fn push_info(&mut self, a: Letter, factor: usize, rank: usize, e: Elem) {
        let i = a.index();
        if self.info.len() <= i {
            self.info.resize(i + 1, LetterInfo { factor: 0, rank: 0 });
            self.elems.resize(i + 1, Vec::new());
        }
        self.info[i] = LetterInfo { factor, rank };
        self.elems[i] = e;
    }

    pub fn factor_of(&self, a: Letter) -> usize {
        self.info[a.index()].factor
    }

    pub(crate) fn rank_of(&self, a: Letter) -> usize {
        self.info[a.index()].rank
    }

    pub fn elem_of(&self, a: Letter) -> &Elem {
        &self.elems[a.index()]
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// Letters of factor `alpha`.
    pub fn letters_of(&self, alpha: usize) -> impl Iterator<Item = Letter> + '_ {
        self.alphabet.letters().filter(move |&a| self.factor_of(a) == alpha)
    }

    /// Reduced normal form of a `Γ`-word.
    pub fn normal_form(&self, w: &Word) -> DeltaWord {
        let mut out = DeltaWord::default();
        for &a in w.letters() {
            out.push(self, self.factor_of(a), self.elem_of(a).clone());
        }
        out
    }

    /// The canonical string of a reduced word.
    pub fn canonical(&self, d: &DeltaWord) -> Word {
        Word(d.blocks.iter().flat_map(|(a, g)| self.factors[*a].canonical(&self.alphabet, g).0).collect())
    }

    /// Whether every maximal single-factor run of `w` multiplies to a
    /// nontrivial element.
    pub fn is_reduced_word(&self, w: &Word) -> bool {
        self.runs(w).iter().all(|&(a, from, to)| {
            let g = self.run_elem(a, &w.letters()[from..to]);
            !self.factors[a].is_identity(&g)
        })
    }

    /// Whether `w` is reduced and every block is canonical.
    pub fn is_canonical_word(&self, w: &Word) -> bool {
        let d = self.normal_form(w);
        &self.canonical(&d) == w
    }

    pub(crate) fn runs(&self, w: &Word) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<(usize, usize, usize)> = Vec::new();
        for (i, &a) in w.letters().iter().enumerate() {
            let f = self.factor_of(a);
            match out.last_mut() {
                Some(r) if r.0 == f => r.2 = i + 1,
                _ => out.push((f, i, i + 1)),
            }
        }
        out
    }

    pub(crate) fn run_elem(&self, alpha: usize, letters: &[Letter]) -> Elem {
        let f = &self.factors[alpha];
        letters.iter().fold(f.identity(), |acc, &a| f.add(&acc, self.elem_of(a)))
    }
}

/// A word over `Δ`: blocks `(α, g)` with `g ∈ G_α \ {1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeltaWord {
    pub blocks: Vec<(usize, Elem)>,
}

impl DeltaWord {
    /// Multiplies by `(α, g)` on the right, merging or cancelling.
    pub fn push(&mut self, spec: &ProductSpec, alpha: usize, g: Elem) {
        let f = &spec.factors[alpha];
        if f.is_identity(&g) {
            return;
        }
        match self.blocks.last_mut() {
            Some((b, h)) if *b == alpha => {
                let s = f.add(h, &g);
                if f.is_identity(&s) {
                    self.blocks.pop();
                } else {
                    *h = s;
                }
            }
            _ => self.blocks.push((alpha, f.normalize(g))),
        }
    }

    pub fn is_reduced(&self, spec: &ProductSpec) -> bool {
        self.blocks.windows(2).all(|w| w[0].0 != w[1].0) && self.blocks.iter().all(|(a, g)| !spec.factors[*a].is_identity(g))
    }

    pub fn inverse(&self, spec: &ProductSpec) -> DeltaWord {
        DeltaWord { blocks: self.blocks.iter().rev().map(|(a, g)| (*a, spec.factors[*a].neg(g))).collect() }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Normal form of `uv` for reduced `u` and `v`.
pub fn reduce_product(spec: &ProductSpec, u: &DeltaWord, v: &DeltaWord) -> DeltaWord {
    let mut out = u.clone();
    for (a, g) in &v.blocks {
        out.push(spec, *a, g.clone());
    }
    out
}

/// `π(w) = ((|w|_α)_α, (ψ_α(w))_α, first(w), last(w))`; `first`/`last` are
/// `None` for the empty word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedParikhImage {
    pub counts: Vec<u64>,
    pub abelian: Vec<Elem>,
    pub first: Option<usize>,
    pub last: Option<usize>,
}

impl ExtendedParikhImage {
    pub fn empty(spec: &ProductSpec) -> Self {
        ExtendedParikhImage {
            counts: vec![0; spec.factors.len()],
            abelian: spec.factors.iter().map(Factor::identity).collect(),
            first: None,
            last: None,
        }
    }

    /// Factors with at least one block.
    pub fn support(&self) -> Vec<usize> {
        (0..self.counts.len()).filter(|&a| self.counts[a] > 0).collect()
    }
}

pub fn parikh_of_delta(spec: &ProductSpec, d: &DeltaWord) -> ExtendedParikhImage {
    let mut p = ExtendedParikhImage::empty(spec);
    for (a, g) in &d.blocks {
        p.counts[*a] += 1;
        p.abelian[*a] = spec.factors[*a].add(&p.abelian[*a], g);
    }
    p.first = d.blocks.first().map(|b| b.0);
    p.last = d.blocks.last().map(|b| b.0);
    p
}

/// `π` of the normal form of `w`.
pub fn parikh_of_word(spec: &ProductSpec, w: &Word) -> ExtendedParikhImage {
    parikh_of_delta(spec, &spec.normal_form(w))
}

/// A constraint on the value of a variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParikhConstraint {
    Exact(ExtendedParikhImage),
    /// `alph(w) = alph`, `first(w) = first`, `last(w) = last`.
    Alphabetic { alph: Vec<usize>, first: Option<usize>, last: Option<usize> },
    NotIdentity,
}

impl ParikhConstraint {
    pub fn holds(&self, p: &ExtendedParikhImage) -> bool {
        match self {
            ParikhConstraint::Exact(q) => p == q,
            ParikhConstraint::Alphabetic { alph, first, last } => {
                &p.support() == alph && p.first == *first && p.last == *last
            }
            ParikhConstraint::NotIdentity => p.first.is_some(),
        }
    }
}
