//! Compression of generic solutions and substitution of interval words.

use std::collections::{HashMap, HashSet};

use crate::alphabet::{Alphabet, Letter, Var, VarRef};
use crate::error::{Error, Result};
use crate::ig::{ig_to_slp, ConversionStats, IgRule, IgSlice, IntervalGrammar};
use crate::num::Length;
use crate::query::equal_eval;
use crate::slp::{Rule, Slp};

use super::cuts::{CutDecomposition, GenericSolution, Occurrence};
use super::EquationSystem;

/// An SLP over `Γ̃` for the generic solution.
#[derive(Debug, Clone)]
pub struct Compressed<L> {
    pub slp: Slp<L>,
    /// `eval(vars[X]) = σ̃(X)`; `None` for variables in no equation.
    pub vars: Vec<Option<VarRef>>,
    /// Size of the interval grammar before conversion.
    pub ig_size: usize,
    pub conversion: ConversionStats,
}

/// The generic words with positions counted in atoms.
struct GenericView {
    occ: Vec<Occurrence>,
    cuts: Vec<Vec<usize>>,
    m: Vec<usize>,
    transports: Vec<(usize, usize, bool)>,
}

impl GenericView {
    fn new(dec: &CutDecomposition, generic: &GenericSolution) -> GenericView {
        let index = |e: usize, p: usize| dec.derived_cuts[e].binary_search(&p).expect("cuts are derived cuts");
        let occ = dec
            .occurrences
            .iter()
            .map(|o| Occurrence { eq: o.eq, var: o.var, left: index(o.eq, o.left), right: index(o.eq, o.right) })
            .collect();
        let cuts = dec.cuts.iter().enumerate().map(|(e, c)| c.iter().map(|&p| index(e, p)).collect()).collect();
        let m = generic.words.iter().map(|w| w.len()).collect();
        GenericView { occ, cuts, m, transports: dec.transports() }
    }

    fn transport(&self, i: usize, j: usize, reflect: bool, p: usize) -> usize {
        let (oi, oj) = (&self.occ[i], &self.occ[j]);
        if reflect {
            oj.right - (p - oi.left)
        } else {
            oj.left + (p - oi.left)
        }
    }

    fn cut_inside(&self, e: usize, lo: usize, hi: usize) -> Option<usize> {
        let c = &self.cuts[e];
        let k = c.partition_point(|&x| x <= lo);
        (k < c.len() && c[k] < hi).then(|| c[k])
    }

    /// A copy of the oriented interval `(e, from, to)` with a cut strictly
    /// inside: among the copies reachable in the fewest transport steps,
    /// the one at the smallest cut (then equation, then position).
    fn covering_copy(&self, e: usize, from: usize, to: usize) -> Option<(usize, usize, usize, usize)> {
        let mut seen: HashSet<(usize, usize, usize)> = HashSet::from([(e, from, to)]);
        let mut level = vec![(e, from, to)];
        while !level.is_empty() {
            let mut best: Option<(usize, usize, usize, usize)> = None;
            for &(e, a, b) in &level {
                let (lo, hi) = (a.min(b), a.max(b));
                if let Some(d) = self.cut_inside(e, lo, hi) {
                    let cand = (d, e, a, b);
                    if best.is_none_or(|x| (cand.0, cand.1, cand.2.min(cand.3), cand.2) < (x.0, x.1, x.2.min(x.3), x.2)) {
                        best = Some(cand);
                    }
                }
            }
            if best.is_some() {
                return best;
            }
            let mut next = Vec::new();
            for &(e, a, b) in &level {
                let (lo, hi) = (a.min(b), a.max(b));
                for &(i, j, reflect) in &self.transports {
                    let oi = &self.occ[i];
                    if oi.eq == e && oi.left <= lo && hi <= oi.right {
                        let img = (self.occ[j].eq, self.transport(i, j, reflect, a), self.transport(i, j, reflect, b));
                        if seen.insert(img) {
                            next.push(img);
                        }
                    }
                }
            }
            level = next;
        }
        None
    }
}

/// Largest `λ` with `2^λ < 2m`, if any.
fn lambda_max(m: usize) -> Option<u32> {
    if m == 0 {
        return None;
    }
    let mut l = 0;
    while (1usize << (l + 1)) < 2 * m {
        l += 1;
    }
    Some(l)
}

fn window(m: usize, gamma: usize, lambda: u32) -> (usize, usize) {
    let r = 1usize << lambda;
    (gamma.saturating_sub(r), (gamma + r).min(m))
}

/// An SLP over `Γ̃` with a variable per equation variable, evaluating to the
/// generic solution.
///
/// For every cut `γ` and every `λ` with `2^λ < 2m` a variable `C_{γ,λ}`
/// produces `w̃[γ−2^λ, γ+2^λ]` (clipped). It extends `C_{γ,λ−1}` on both
/// sides by halves that are single letters or, not being free, slices of
/// some `C_{δ,λ−1}` at a cut `δ` inside a transported copy. Each variable
/// is a slice of the widest `C` of its equation; the interval grammar is
/// then converted to an SLP.
pub fn compress_generic<L: Length>(
    dec: &CutDecomposition,
    generic: &GenericSolution,
    system: &EquationSystem,
) -> Result<Compressed<L>> {
    let view = GenericView::new(dec, generic);
    let al = &generic.alphabet;
    let mut ig: IntervalGrammar<L> = IntervalGrammar::new(al.clone());
    let taken: HashSet<&str> = system.variables.iter().map(String::as_str).collect();
    let fresh = |name: String| {
        let mut n = name;
        while taken.contains(n.as_str()) {
            n.push('_');
        }
        n
    };
    let mut letter_vars: HashMap<Letter, Var> = HashMap::new();
    for (k, a) in al.letters().enumerate() {
        if al.positives().any(|p| p == a) || al.bar(a) == a {
            let v = ig.push(&fresh(format!("L{}", k + 1)), IgRule::Terminal(Some(a)))?;
            letter_vars.insert(a, v);
        }
    }
    let letter = |a: Letter| -> IgSlice<L> {
        let var = match letter_vars.get(&a) {
            Some(&v) => v.pos(),
            None => letter_vars[&al.bar(a)].neg(),
        };
        IgSlice { var, lo: L::zero(), hi: L::one() }
    };
    let lmax: Vec<Option<u32>> = view.m.iter().map(|&m| lambda_max(m)).collect();
    let top = lmax.iter().flatten().copied().max();
    let mut cvars: HashMap<(usize, usize, u32), Var> = HashMap::new();
    let to_l = |n: usize| L::from_count(n);
    if let Some(top) = top {
        for lambda in 0..=top {
            for e in 0..view.m.len() {
                if lmax[e].is_none_or(|l| l < lambda) {
                    continue;
                }
                let m = view.m[e];
                let word = &generic.words[e];
                for &gamma in &view.cuts[e] {
                    let name = fresh(format!("C{}_{}_{}", e, gamma, lambda));
                    let (mu, nu2) = window(m, gamma, lambda);
                    let v = if lambda == 0 {
                        let parts: Vec<IgSlice<L>> = word.letters()[mu..nu2].iter().map(|&a| letter(a)).collect();
                        match parts.len() {
                            1 => ig.push(&name, IgRule::Slice(parts[0].clone()))?,
                            2 => ig.push(&name, IgRule::SlicePair(parts[0].clone(), parts[1].clone()))?,
                            _ => unreachable!("a non-empty window of radius one"),
                        }
                    } else {
                        let (nu, mu2) = window(m, gamma, lambda - 1);
                        let inner = cvars[&(e, gamma, lambda - 1)];
                        let mut parts = Vec::new();
                        let half = |from: usize, to: usize| -> Result<Option<IgSlice<L>>> {
                            if from == to {
                                return Ok(None);
                            }
                            if to - from == 1 {
                                return Ok(Some(letter(word.letters()[from])));
                            }
                            let (d, e2, a, b) = view.covering_copy(e, from, to).ok_or_else(|| {
                                Error::InternalInvariantViolation(format!("no cut covers a copy of [{from},{to}] in equation {e}"))
                            })?;
                            let l2 = (lambda - 1).min(lmax[e2].expect("copy in a non-empty word"));
                            let (s, t) = window(view.m[e2], d, l2);
                            let c = cvars[&(e2, d, l2)];
                            let (lo, hi) = (a.min(b) - s, a.max(b) - s);
                            Ok(Some(if a < b {
                                IgSlice { var: c.pos(), lo: to_l(lo), hi: to_l(hi) }
                            } else {
                                let w = t - s;
                                IgSlice { var: c.neg(), lo: to_l(w - hi), hi: to_l(w - lo) }
                            }))
                        };
                        let left = half(mu, nu)?;
                        let right = half(mu2, nu2)?;
                        let middle = IgSlice { var: inner.pos(), lo: L::zero(), hi: ig.len(inner.pos()).clone() };
                        parts.extend(left);
                        parts.push(middle);
                        parts.extend(right);
                        match parts.len() {
                            1 => ig.push(&name, IgRule::Slice(parts.pop().unwrap()))?,
                            2 => {
                                let (p, q) = (parts[0].clone(), parts[1].clone());
                                ig.push(&name, IgRule::SlicePair(p, q))?
                            }
                            _ => {
                                let aux = ig.push(&fresh(format!("{name}_l")), IgRule::SlicePair(parts[0].clone(), parts[1].clone()))?;
                                let full = IgSlice { var: aux.pos(), lo: L::zero(), hi: ig.len(aux.pos()).clone() };
                                ig.push(&name, IgRule::SlicePair(full, parts[2].clone()))?
                            }
                        }
                    };
                    cvars.insert((e, gamma, lambda), v);
                }
            }
        }
    }
    let mut first: Vec<Option<usize>> = vec![None; system.variables.len()];
    for (i, o) in view.occ.iter().enumerate() {
        first[o.var.var.index()].get_or_insert(i);
    }
    let mut ig_vars: Vec<Option<Var>> = vec![None; system.variables.len()];
    for (x, f) in first.iter().enumerate() {
        let Some(i) = *f else { continue };
        let o = view.occ[i];
        let name = &system.variables[x];
        let rule = match lmax[o.eq] {
            Some(l) if o.left < o.right => {
                let c = cvars[&(o.eq, view.cuts[o.eq][0], l)];
                let m = view.m[o.eq];
                if o.var.bar {
                    IgRule::Slice(IgSlice { var: c.neg(), lo: to_l(m - o.right), hi: to_l(m - o.left) })
                } else {
                    IgRule::Slice(IgSlice { var: c.pos(), lo: to_l(o.left), hi: to_l(o.right) })
                }
            }
            _ => IgRule::Terminal(None),
        };
        ig_vars[x] = Some(ig.push(name, rule)?);
    }
    let conv = ig_to_slp(&ig)?;
    let roots: Vec<VarRef> = ig_vars.iter().flatten().map(|v| conv.vars[v.index()]).collect();
    let (slp, images) = conv.slp.prune(&roots);
    let mut it = images.into_iter();
    let vars = ig_vars.iter().map(|v| v.map(|_| it.next().unwrap())).collect();
    Ok(Compressed { slp, vars, ig_size: ig.size(), conversion: conv.stats })
}

/// Result of [`substitute_intervals`].
#[derive(Debug, Clone)]
pub struct Substituted<L> {
    pub slp: Slp<L>,
    /// Image of every variable of the compressed program.
    pub map: Vec<VarRef>,
}

/// Replaces every letter `c` of `Γ̃` in `compressed` by the donor variable
/// `omega[c]`. Letters without an entry take the inverse of their bar's
/// entry; given pairs must be mutually inverse.
pub fn substitute_intervals<L: Length>(
    compressed: &Slp<L>,
    donor: &Slp<L>,
    omega: &[Option<VarRef>],
) -> Result<Substituted<L>> {
    let gal: &Alphabet = compressed.alphabet();
    let mut out = Slp::new(donor.alphabet().clone());
    let dmap = out.absorb(donor)?;
    let lift = |r: VarRef| dmap[r.var.index()].flipped(r.bar);
    let mut images: Vec<VarRef> = Vec::with_capacity(gal.len());
    for a in gal.letters() {
        let own = omega.get(a.index()).copied().flatten().map(lift);
        let dual = omega.get(gal.bar(a).index()).copied().flatten().map(lift);
        let img = match (own, dual) {
            (Some(x), _) => x,
            (None, Some(y)) => y.inverse(),
            (None, None) => return Err(Error::MissingAssignment(gal.name(a).to_string())),
        };
        if let Some(y) = dual {
            if !equal_eval(&out, img, y.inverse()) {
                return Err(Error::InvolutionMismatch(format!("{} and {}", gal.name(a), gal.name(gal.bar(a)))));
            }
        }
        images.push(img);
    }
    let mut map: Vec<VarRef> = Vec::with_capacity(compressed.num_vars());
    for v in compressed.vars() {
        let r = match compressed.rule(v) {
            Rule::Terminal(Some(a)) => images[a.index()],
            Rule::Terminal(None) => out.empty_var(),
            Rule::Pair(y, z) => {
                let (y, z) = (map[y.var.index()].flipped(y.bar), map[z.var.index()].flipped(z.bar));
                let before = out.num_vars();
                let r = out.concat(y, z)?;
                if out.num_vars() > before {
                    let _ = out.rename(r.var, compressed.name(v));
                }
                r
            }
        };
        map.push(r);
    }
    Ok(Substituted { slp: out, map })
}
