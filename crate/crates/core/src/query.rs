//! Interval questions on SLP-compressed words.
//!
//! A question `X[i,j] ?= Y[k,ℓ]` holds iff `j−i = ℓ−k` and the two factors
//! are equal. Batches are answered without decompression: questions are
//! first brought to standard form `A[i,j] ?= B[0,j−i]`, then split top-down
//! along the rules, highest `h(A)+h(B)` first. Questions comparing a suffix
//! of `A` with a prefix of `B` ("mixed" questions) are grouped per pair and
//! compacted with Fine–Wilf before they are split further.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;

use crate::alphabet::{VarRef, Word};
use crate::error::{Error, Result};
use crate::num::{diff, Length};
use crate::slp::Slp;

/// `x[i, j] ?= y[k, l]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Question<L> {
    pub x: VarRef,
    pub i: L,
    pub j: L,
    pub y: VarRef,
    pub k: L,
    pub l: L,
}

impl<L: Length> Question<L> {
    pub fn new(x: VarRef, i: L, j: L, y: VarRef, k: L, l: L) -> Self {
        Question { x, i, j, y, k, l }
    }

    /// `x ?= y` on the full words; both must have the same length.
    pub fn full(slp: &Slp<L>, x: VarRef, y: VarRef) -> Self {
        Question::new(x, L::zero(), slp.len(x).clone(), y, L::zero(), slp.len(y).clone())
    }

    fn check(&self, slp: &Slp<L>) -> Result<()> {
        let ok = self.i <= self.j
            && self.k <= self.l
            && &self.j <= slp.len(self.x)
            && &self.l <= slp.len(self.y)
            && diff(&self.j, &self.i) == diff(&self.l, &self.k);
        if ok {
            Ok(())
        } else {
            Err(Error::MalformedQuestion(format!(
                "{}[{},{}] = {}[{},{}]",
                slp.display(self.x),
                self.i,
                self.j,
                slp.display(self.y),
                self.k,
                self.l
            )))
        }
    }
}

impl<L: fmt::Display> fmt::Display for Question<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{},{}] = {:?}[{},{}]", self.x, self.i, self.j, self.y, self.k, self.l)
    }
}

/// `uv = vu`, decided by comparing `uv` and `vu` on their first
/// `|u|+|v|−gcd(|u|,|v|)` letters.
pub fn commutes(u: &Word, v: &Word) -> bool {
    if u.is_empty() || v.is_empty() {
        return true;
    }
    let n = u.len() + v.len() - u.len().gcd(&v.len());
    let uv = u.letters().iter().chain(v.letters());
    let vu = v.letters().iter().chain(u.letters());
    uv.zip(vu).take(n).all(|(a, b)| a == b)
}

/// Replaces the mixed questions at offsets `j`, `j−p`, `j−q` by the two at
/// `j` and `j−gcd(p,q)`.
///
/// The replacement is sound only when `j ≥ p+q−gcd(p,q)`: the three
/// questions say that the common prefix/suffix of length `j` has periods
/// `p` and `q`, and Fine–Wilf needs that much length to conclude period
/// `gcd(p,q)`. Shorter windows are rejected.
pub fn merge_mixed<L: Length>(j: &L, p: &L, q: &L) -> Result<(L, L)> {
    if p.is_zero() || p >= q || q >= j {
        return Err(Error::PreconditionViolated(format!("need 1 <= p < q < j, got j={j} p={p} q={q}")));
    }
    let g = p.gcd(q);
    if diff(&(p.clone() + q.clone()), &g) > *j {
        return Err(Error::PreconditionViolated(format!(
            "j={j} is shorter than p+q-gcd(p,q)={}",
            diff(&(p.clone() + q.clone()), &g)
        )));
    }
    Ok((j.clone(), diff(j, &g)))
}

/// Reduces a set of periods of a word of length `n` to an equivalent set:
/// multiples of a kept period are dropped, and two periods that Fine–Wilf
/// applies to are replaced by their gcd.
pub fn compact_periods<L: Length>(n: &L, periods: impl IntoIterator<Item = L>) -> Vec<L> {
    let mut set: BTreeSet<L> = periods.into_iter().filter(|p| !p.is_zero() && p < n).collect();
    loop {
        let v: Vec<L> = set.iter().cloned().collect();
        let mut changed = false;
        'outer: for a in 0..v.len() {
            for b in a + 1..v.len() {
                let (p, q) = (&v[a], &v[b]);
                if q.is_multiple_of(p) {
                    set.remove(q);
                    changed = true;
                    break 'outer;
                }
                let g = p.gcd(q);
                if diff(&(p.clone() + q.clone()), &g) <= *n {
                    set.remove(p);
                    set.remove(q);
                    set.insert(g);
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            return set.into_iter().collect();
        }
    }
}

/// `a[i, j] ?= b[0, j−i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Std<L> {
    a: VarRef,
    i: L,
    j: L,
    b: VarRef,
}

/// Counters from one batch run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub standard: usize,
    pub mixed_before: usize,
    pub mixed_after: usize,
    pub steps: usize,
}

struct Solver<'a, L> {
    slp: &'a Slp<L>,
    levels: BTreeMap<u32, BTreeSet<Std<L>>>,
    stats: QueryStats,
}

impl<'a, L: Length> Solver<'a, L> {
    fn push(&mut self, q: Std<L>) {
        if q.i == q.j {
            return;
        }
        let level = self.slp.height(q.a) + self.slp.height(q.b);
        if self.levels.entry(level).or_default().insert(q) {
            self.stats.standard += 1;
        }
    }

    /// Phase one: `x[i,j] ?= y[k,l]` as standard questions.
    fn push_general(&mut self, q: Question<L>) {
        let mut stack = vec![q];
        while let Some(q) = stack.pop() {
            self.stats.steps += 1;
            if q.i == q.j {
                continue;
            }
            if q.k.is_zero() {
                self.push(Std { a: q.x, i: q.i, j: q.j, b: q.y });
                continue;
            }
            if q.i.is_zero() {
                self.push(Std { a: q.y, i: q.k, j: q.l, b: q.x });
                continue;
            }
            let Some((c, d)) = self.slp.children(q.x) else {
                // a terminal: x[0,1], handled above since i = 0
                unreachable!("non-empty slice of a terminal starts at 0");
            };
            let lc = self.slp.len(c).clone();
            if q.j <= lc {
                stack.push(Question { x: c, ..q });
            } else if q.i >= lc {
                stack.push(Question { x: d, i: diff(&q.i, &lc), j: diff(&q.j, &lc), ..q });
            } else {
                // c[i,|c|] = y[k,m] and d[0,j−|c|] = y[m,l]
                let m = q.k.clone() + diff(&lc, &q.i);
                let ly = self.slp.len(q.y).clone();
                self.push(Std { a: q.y.inverse(), i: diff(&ly, &m), j: diff(&ly, &q.k), b: c.inverse() });
                self.push(Std { a: q.y, i: m, j: q.l, b: d });
            }
        }
    }

    /// Groups the suffix-against-prefix questions of one level by pair and
    /// keeps an equivalent, smaller set.
    fn compact(&mut self, level: BTreeSet<Std<L>>) -> Vec<Std<L>> {
        let mut out = Vec::new();
        // canonical pair -> offsets; `(a, b, ℓ)` is equivalent to `(b̄, ā, ℓ)`
        let mut mixed: BTreeMap<(VarRef, VarRef), Vec<L>> = BTreeMap::new();
        for q in level {
            if &q.j == self.slp.len(q.a) {
                let len = diff(&q.j, &q.i);
                let key = (q.a, q.b).min((q.b.inverse(), q.a.inverse()));
                mixed.entry(key).or_default().push(len);
                self.stats.mixed_before += 1;
            } else {
                out.push(q);
            }
        }
        for ((a, b), offsets) in mixed {
            let n = offsets.iter().max().unwrap().clone();
            let periods = compact_periods(&n, offsets.iter().map(|l| diff(&n, l)));
            let la = self.slp.len(a).clone();
            for len in std::iter::once(n.clone()).chain(periods.iter().map(|p| diff(&n, p))) {
                self.stats.mixed_after += 1;
                out.push(Std { a, i: diff(&la, &len), j: la.clone(), b });
            }
        }
        out
    }

    /// Phase two; `false` as soon as some question fails.
    fn run(&mut self) -> Result<bool> {
        while let Some((_, level)) = self.levels.pop_last() {
            for q in self.compact(level) {
                self.stats.steps += 1;
                match self.slp.children(q.a) {
                    None => {
                        let a = self.slp.terminal(q.a).unwrap().expect("non-empty question");
                        if self.slp.letter_at(q.b, &L::zero())? != a {
                            return Ok(false);
                        }
                    }
                    Some((c, d)) => {
                        let lc = self.slp.len(c).clone();
                        if q.j <= lc {
                            self.push(Std { a: c, ..q });
                        } else if q.i >= lc {
                            self.push(Std { a: d, i: diff(&q.i, &lc), j: diff(&q.j, &lc), b: q.b });
                        } else {
                            let l = diff(&lc, &q.i);
                            let total = diff(&q.j, &q.i);
                            self.push(Std { a: c, i: q.i, j: lc, b: q.b });
                            self.push(Std { a: q.b, i: l, j: total, b: d });
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Whether all questions hold, with run statistics.
pub fn all_hold<L: Length>(slp: &Slp<L>, questions: &[Question<L>]) -> Result<(bool, QueryStats)> {
    for q in questions {
        q.check(slp)?;
    }
    let mut s = Solver { slp, levels: BTreeMap::new(), stats: QueryStats::default() };
    for q in questions {
        s.push_general(q.clone());
    }
    let ok = s.run()?;
    Ok((ok, s.stats))
}

/// One answer per question. Malformed questions are errors, not `false`.
pub fn answer_interval_questions<L: Length>(slp: &Slp<L>, questions: &[Question<L>]) -> Result<Vec<bool>> {
    if all_hold(slp, questions)?.0 {
        return Ok(vec![true; questions.len()]);
    }
    questions
        .iter()
        .map(|q| all_hold(slp, std::slice::from_ref(q)).map(|r| r.0))
        .collect()
}

/// `eval(x) = eval(y)`.
pub fn equal_eval<L: Length>(slp: &Slp<L>, x: VarRef, y: VarRef) -> bool {
    if slp.len(x) != slp.len(y) {
        return false;
    }
    all_hold(slp, &[Question::full(slp, x, y)]).expect("well-formed by construction").0
}

/// Whether `eval(x)[0,p] = eval(y)[0,p]`; `p` must not exceed either length.
pub fn prefix_equal<L: Length>(slp: &Slp<L>, x: VarRef, y: VarRef, p: &L) -> bool {
    let q = Question::new(x, L::zero(), p.clone(), y, L::zero(), p.clone());
    all_hold(slp, &[q]).expect("prefix within both words").0
}

/// Length of the longest common prefix of `eval(x)` and `eval(y)`.
pub fn longest_common_prefix<L: Length>(slp: &Slp<L>, x: VarRef, y: VarRef) -> L {
    let (mut lo, mut hi) = (L::zero(), slp.len(x).clone().min(slp.len(y).clone()));
    // invariant: prefix of length lo agrees; every length > hi disagrees
    while lo < hi {
        let mid = (lo.clone() + hi.clone() + L::one()) / (L::one() + L::one());
        if prefix_equal(slp, x, y, &mid) {
            lo = mid;
        } else {
            hi = mid - L::one();
        }
    }
    lo
}
