//! Bottom-up block data of SLP evaluations over a free product.


use super::{ExtendedParikhImage, Factor, ProductSpec};
use crate::alphabet::{Letter, VarRef};
use crate::error::{Error, Result};
use crate::num::Length;
use crate::query::longest_common_prefix;
use crate::slp::{Rule, Slp};

/// A single-factor run, possibly part of a longer block.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Part {
    factor: usize,
    /// Letter multiplicities, sorted by letter.
    counts: Vec<(Letter, u64)>,
    /// Whether the letters appear in canonical order.
    sorted: bool,
    min_rank: usize,
    max_rank: usize,
}

impl Part {
    fn letter(spec: &ProductSpec, a: Letter) -> Part {
        let r = spec.rank_of(a);
        Part { factor: spec.factor_of(a), counts: vec![(a, 1)], sorted: true, min_rank: r, max_rank: r }
    }

    fn join(&self, other: &Part) -> Part {
        let mut counts = self.counts.clone();
        for &(a, k) in &other.counts {
            match counts.iter_mut().find(|c| c.0 == a) {
                Some(c) => c.1 += k,
                None => counts.push((a, k)),
            }
        }
        counts.sort();
        Part {
            factor: self.factor,
            counts,
            sorted: self.sorted && other.sorted && self.max_rank <= other.min_rank,
            min_rank: self.min_rank.min(other.min_rank),
            max_rank: self.max_rank.max(other.max_rank),
        }
    }

    fn len(&self) -> u64 {
        self.counts.iter().map(|c| c.1).sum()
    }

    fn elem(&self, spec: &ProductSpec) -> Vec<i64> {
        let f = &spec.factors[self.factor];
        self.counts.iter().fold(f.identity(), |acc, &(a, k)| {
            let g: Vec<i64> = spec.elem_of(a).iter().map(|&c| (c as i128 * k as i128 % modulus_bound(f)) as i64).collect();
            f.add(&acc, &g)
        })
    }

    /// `(nontrivial, canonical)` as a complete block.
    fn check(&self, spec: &ProductSpec) -> (bool, bool) {
        let f = &spec.factors[self.factor];
        let g = self.elem(spec);
        if f.is_identity(&g) {
            return (false, false);
        }
        let mut canon: Vec<(Letter, u64)> = f.canonical_runs(&spec.alphabet, &g);
        canon.sort();
        (true, self.sorted && canon == self.counts)
    }
}

/// Keeps products of free coordinates exact and torsion products small.
fn modulus_bound(f: &Factor) -> i128 {
    if f.rank > 0 {
        i128::MAX
    } else {
        f.torsion.iter().map(|&d| d as i128).product()
    }
}

#[derive(Debug, Clone, Default)]
enum Summary {
    #[default]
    Empty,
    Uniform(Part),
    Multi { first: Part, last: Part, runs: Vec<u64>, abelian: Vec<Vec<i64>>, reduced: bool, canonical: bool },
}

fn join(spec: &ProductSpec, y: &Summary, z: &Summary) -> Summary {
    use Summary::*;
    let nf = spec.factors.len();
    let single = |p: &Part| {
        let mut runs = vec![0; nf];
        runs[p.factor] = 1;
        let mut ab: Vec<Vec<i64>> = spec.factors.iter().map(Factor::identity).collect();
        ab[p.factor] = p.elem(spec);
        (runs, ab)
    };
    let parts = |s: &Summary| -> (Part, Part, Vec<u64>, Vec<Vec<i64>>, bool, bool) {
        match s {
            Uniform(p) => {
                let (r, a) = single(p);
                (p.clone(), p.clone(), r, a, true, true)
            }
            Multi { first, last, runs, abelian, reduced, canonical } => {
                (first.clone(), last.clone(), runs.clone(), abelian.clone(), *reduced, *canonical)
            }
            Empty => unreachable!(),
        }
    };
    match (y, z) {
        (Empty, s) | (s, Empty) => s.clone(),
        (Uniform(a), Uniform(b)) if a.factor == b.factor => Uniform(a.join(b)),
        _ => {
            let (f1, l1, r1, a1, red1, can1) = parts(y);
            let (f2, l2, r2, a2, red2, can2) = parts(z);
            let y_uniform = matches!(y, Uniform(_));
            let z_uniform = matches!(z, Uniform(_));
            let mut runs: Vec<u64> = r1.iter().zip(&r2).map(|(a, b)| a + b).collect();
            let abelian: Vec<Vec<i64>> = (0..nf).map(|k| spec.factors[k].add(&a1[k], &a2[k])).collect();
            let (mut reduced, mut canonical) = (red1 && red2, can1 && can2);
            let mut first = f1;
            let mut last = l2;
            if l1.factor == f2.factor {
                runs[l1.factor] -= 1;
                let mid = l1.join(&f2);
                match (y_uniform, z_uniform) {
                    (true, _) => first = mid,
                    (_, true) => last = mid,
                    _ => {
                        let (r, c) = mid.check(spec);
                        reduced &= r;
                        canonical &= c;
                    }
                }
            } else {
                for (p, interior) in [(&l1, !y_uniform), (&f2, !z_uniform)] {
                    if interior {
                        let (r, c) = p.check(spec);
                        reduced &= r;
                        canonical &= c;
                    }
                }
            }
            Multi { first, last, runs, abelian, reduced, canonical }
        }
    }
}

/// Block data of every variable of an SLP in both orientations, extended
/// on demand as the SLP grows.
#[derive(Debug, Clone, Default)]
pub struct BlockAnalysis {
    data: Vec<[Summary; 2]>,
}

impl BlockAnalysis {
    pub fn new() -> Self {
        Self::default()
    }

    fn update<L: Length>(&mut self, spec: &ProductSpec, slp: &Slp<L>) -> Result<()> {
        if slp.alphabet() != &spec.alphabet {
            return Err(Error::UnknownSymbol("the program is not over the alphabet of the product".into()));
        }
        for v in slp.vars().skip(self.data.len()) {
            let entry = match slp.rule(v) {
                Rule::Terminal(None) => [Summary::Empty, Summary::Empty],
                Rule::Terminal(Some(a)) => {
                    let b = spec.alphabet.bar(a);
                    [Summary::Uniform(Part::letter(spec, a)), Summary::Uniform(Part::letter(spec, b))]
                }
                Rule::Pair(y, z) => {
                    let get = |r: VarRef, flip: bool| &self.data[r.var.index()][(r.bar ^ flip) as usize];
                    [join(spec, get(y, false), get(z, false)), join(spec, get(z, true), get(y, true))]
                }
            };
            self.data.push(entry);
        }
        Ok(())
    }

    fn get<L: Length>(&mut self, spec: &ProductSpec, slp: &Slp<L>, x: VarRef) -> Result<&Summary> {
        self.update(spec, slp)?;
        Ok(&self.data[x.var.index()][x.bar as usize])
    }

    /// `(reduced, canonical)` for `eval(x)`.
    pub fn check<L: Length>(&mut self, spec: &ProductSpec, slp: &Slp<L>, x: VarRef) -> Result<(bool, bool)> {
        Ok(match self.get(spec, slp, x)? {
            Summary::Empty => (true, true),
            Summary::Uniform(p) => p.check(spec),
            Summary::Multi { first, last, reduced, canonical, .. } => {
                let (r1, c1) = first.check(spec);
                let (r2, c2) = last.check(spec);
                (*reduced && r1 && r2, *canonical && c1 && c2)
            }
        })
    }

    /// `π(eval(x))`, provided `eval(x)` is reduced.
    pub fn parikh<L: Length>(&mut self, spec: &ProductSpec, slp: &Slp<L>, x: VarRef) -> Result<ExtendedParikhImage> {
        if !self.check(spec, slp, x)?.0 {
            return Err(Error::NotReduced(slp.display(x)));
        }
        let mut p = ExtendedParikhImage::empty(spec);
        match self.get(spec, slp, x)? {
            Summary::Empty => {}
            Summary::Uniform(q) => {
                p.counts[q.factor] = 1;
                p.abelian[q.factor] = q.elem(spec);
                p.first = Some(q.factor);
                p.last = Some(q.factor);
            }
            Summary::Multi { first, last, runs, abelian, .. } => {
                p.counts = runs.clone();
                p.abelian = abelian.clone();
                p.first = Some(first.factor);
                p.last = Some(last.factor);
            }
        }
        Ok(p)
    }

    /// Lengths and elements of the first and last runs of `eval(x)`.
    fn ends<L: Length>(&mut self, spec: &ProductSpec, slp: &Slp<L>, x: VarRef) -> Result<Option<[(usize, u64, Vec<i64>); 2]>> {
        let end = |p: &Part| (p.factor, p.len(), p.elem(spec));
        Ok(match self.get(spec, slp, x)? {
            Summary::Empty => None,
            Summary::Uniform(p) => Some([end(p), end(p)]),
            Summary::Multi { first, last, .. } => Some([end(first), end(last)]),
        })
    }
}

pub fn is_reduced_slp<L: Length>(spec: &ProductSpec, slp: &Slp<L>, x: VarRef) -> Result<bool> {
    Ok(BlockAnalysis::new().check(spec, slp, x)?.0)
}

/// Whether `eval(x)` is reduced with every block in canonical form.
pub fn is_canonical_slp<L: Length>(spec: &ProductSpec, slp: &Slp<L>, x: VarRef) -> Result<bool> {
    Ok(BlockAnalysis::new().check(spec, slp, x)?.1)
}

pub fn parikh_of_slp<L: Length>(spec: &ProductSpec, slp: &Slp<L>, x: VarRef) -> Result<ExtendedParikhImage> {
    BlockAnalysis::new().parikh(spec, slp, x)
}

fn to_l<L: Length>(n: u64) -> L {
    L::from_u64(n).expect("lengths hold u64 values")
}

fn to_u64<L: Length>(n: &L) -> Result<u64> {
    n.to_u64().ok_or(Error::LengthOverflow)
}

/// The canonical block of `g ∈ G_α` with `O(log)` rules per letter run.
pub fn push_block<L: Length>(slp: &mut Slp<L>, spec: &ProductSpec, alpha: usize, g: &[i64]) -> Result<VarRef> {
    let mut parts = Vec::new();
    for (a, k) in spec.factors[alpha].canonical_runs(&spec.alphabet, g) {
        let x = slp.letter_var(a);
        parts.push(slp.push_power(x, &to_l(k))?);
    }
    Ok(slp.concat_all(&parts)?.unwrap_or_else(|| slp.empty_var()))
}

fn factor_at<L: Length>(spec: &ProductSpec, slp: &Slp<L>, x: VarRef, p: u64) -> Result<usize> {
    Ok(spec.factor_of(slp.letter_at(x, &to_l(p))?))
}

/// The canonical reduced product of two canonical reduced words.
pub fn reduce_concat<L: Length>(
    spec: &ProductSpec,
    slp: &mut Slp<L>,
    analysis: &mut BlockAnalysis,
    u: VarRef,
    v: VarRef,
) -> Result<VarRef> {
    let (nu, nv) = (to_u64(slp.len(u))?, to_u64(slp.len(v))?);
    let l = to_u64(&longest_common_prefix(slp, u.inverse(), v))?;
    let boundary = |x: VarRef, n: u64, p: u64| -> Result<bool> {
        Ok(p == 0 || p == n || factor_at(spec, slp, x, p - 1)? != factor_at(spec, slp, x, p)?)
    };
    // blocks of u⁻¹ and v agree before l; whole blocks cancel up to k
    let k = if boundary(u.inverse(), nu, l)? && boundary(v, nv, l)? {
        l
    } else {
        let pre = slp.prefix(v, &to_l(l))?;
        let [_, (_, run, _)] = analysis.ends(spec, slp, pre)?.expect("l > 0 here");
        l - run
    };
    let u1 = slp.prefix(u, &to_l(nu - k))?;
    let v1 = slp.suffix(v, &to_l(nv - k))?;
    let (Some([_, (fa, la, a)]), Some([(fb, lb, b), _])) = (analysis.ends(spec, slp, u1)?, analysis.ends(spec, slp, v1)?) else {
        return slp.concat(u1, v1);
    };
    if fa != fb {
        return slp.concat(u1, v1);
    }
    let f = &spec.factors[fa];
    let c = f.add(&a, &b);
    if f.is_identity(&c) {
        return Err(Error::InternalInvariantViolation("blocks cancel after the common prefix".into()));
    }
    let left = slp.prefix(u1, &to_l(nu - k - la))?;
    let right = slp.suffix(v1, &to_l(nv - k - lb))?;
    let mid = push_block(slp, spec, fa, &c)?;
    let lm = slp.concat(left, mid)?;
    slp.concat(lm, right)
}

/// Canonical reduced form of `eval(x₁) ⋯ eval(x_k)` for canonical reduced
/// factors.
pub fn reduce_all<L: Length>(
    spec: &ProductSpec,
    slp: &mut Slp<L>,
    analysis: &mut BlockAnalysis,
    parts: &[VarRef],
) -> Result<VarRef> {
    let mut acc = slp.empty_var();
    for &p in parts {
        acc = reduce_concat(spec, slp, analysis, acc, p)?;
    }
    Ok(acc)
}

