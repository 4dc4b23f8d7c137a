//! Equations over free products: splitting into word equations, compressed
//! certificates and their verification.

use std::collections::BTreeMap;

use super::{
    parikh_of_delta, push_block, reduce_all, reorder, BlockAnalysis, DeltaWord, ExtendedParikhImage, ParikhConstraint,
    ProductSpec,
};
use crate::alphabet::{Var, VarRef, Word};
use crate::equations::{
    compress_generic, compute_cuts, generic_solution, maximal_free_intervals, substitute_intervals, Equation,
    EquationSystem, Solution,
};
use crate::error::{Error, Result};
use crate::num::Length;
use crate::query::equal_eval;
use crate::slp::Slp;

/// Equations `L = R` over `F`, read as products of variable values, with
/// constraints on the values.
#[derive(Debug, Clone, Default)]
pub struct ProductSystem {
    pub spec: ProductSpec,
    pub equations: EquationSystem,
    pub constraints: Vec<(Var, ParikhConstraint)>,
}

impl ProductSystem {
    pub fn new(spec: ProductSpec) -> Self {
        let equations = EquationSystem::new(spec.alphabet.clone());
        ProductSystem { spec, equations, constraints: Vec::new() }
    }

    pub fn add_equation(&mut self, lhs: &str, rhs: &str) -> Result<()> {
        self.equations.add_equation(lhs, rhs)
    }

    /// `L ≠ R`, written as `L = R X` with a fresh `X ≠ 1`. Returns `X`.
    pub fn add_inequality(&mut self, lhs: &str, rhs: &str) -> Result<Var> {
        let mut n = self.equations.variables.len();
        let name = loop {
            let name = format!("D{n}");
            if self.equations.var(&name).is_none() {
                break name;
            }
            n += 1;
        };
        self.equations.add_equation(lhs, &format!("{rhs} {name}"))?;
        let x = self.equations.var(&name).unwrap();
        self.constraints.push((x, ParikhConstraint::NotIdentity));
        Ok(x)
    }

    pub fn add_constraint(&mut self, x: &str, c: ParikhConstraint) -> Result<()> {
        let v = self.equations.declare(x)?;
        self.constraints.push((v, c));
        Ok(())
    }

    /// Whether `x` has to be bound in a solution.
    fn needed(&self, x: Var) -> bool {
        self.equations.occurs(x) || self.constraints.iter().any(|c| c.0 == x)
    }
}

/// Reduced normal forms of `σ`, after checking that it solves the system.
pub fn check_solution(sys: &ProductSystem, sigma: &Solution) -> Result<Vec<Option<DeltaWord>>> {
    let spec = &sys.spec;
    let values: Vec<Option<DeltaWord>> = (0..sys.equations.variables.len())
        .map(|i| sigma.words.get(i).cloned().flatten().map(|w| spec.normal_form(&w)))
        .collect();
    let value = |r: VarRef| -> Result<DeltaWord> {
        let d = values[r.var.index()]
            .as_ref()
            .ok_or_else(|| Error::MissingAssignment(sys.equations.name(r.var).to_string()))?;
        Ok(if r.bar { d.inverse(spec) } else { d.clone() })
    };
    let side = |s: &[VarRef]| -> Result<DeltaWord> {
        s.iter().try_fold(DeltaWord::default(), |acc, &r| Ok(super::reduce_product(spec, &acc, &value(r)?)))
    };
    for (i, e) in sys.equations.equations.iter().enumerate() {
        if side(&e.lhs)? != side(&e.rhs)? {
            return Err(Error::NotASolution(format!("equation {} fails in the product", i + 1)));
        }
    }
    for (x, c) in &sys.constraints {
        if !c.holds(&parikh_of_delta(spec, &value(x.pos())?)) {
            return Err(Error::NotASolution(format!("constraint on {} fails", sys.equations.name(*x))));
        }
    }
    Ok(values)
}

/// The value of `Z = XY` split as `X = P A Q̄`, `Y = Q B R`, `Z = P C R`
/// with `A`, `B`, `C` single blocks of one factor (or empty) and `AB = C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    pub p: DeltaWord,
    pub q: DeltaWord,
    pub r: DeltaWord,
    pub a: DeltaWord,
    pub b: DeltaWord,
    pub c: DeltaWord,
}

/// Resolves the choice in the splitting from the cancellation in `uv`.
pub fn split_triangle(spec: &ProductSpec, u: &DeltaWord, v: &DeltaWord) -> Triangle {
    let (m, n) = (u.len(), v.len());
    let mut k = 0;
    while k < m.min(n) {
        let (a, g) = &u.blocks[m - 1 - k];
        let (b, h) = &v.blocks[k];
        if a != b || !spec.factors[*a].is_identity(&spec.factors[*a].add(g, h)) {
            break;
        }
        k += 1;
    }
    let dw = |b: &[(usize, Vec<i64>)]| DeltaWord { blocks: b.to_vec() };
    let one = |b: &(usize, Vec<i64>)| dw(std::slice::from_ref(b));
    if k < m && k < n && u.blocks[m - 1 - k].0 == v.blocks[k].0 {
        let (alpha, g) = &u.blocks[m - 1 - k];
        let h = &v.blocks[k].1;
        let c = spec.factors[*alpha].add(g, h);
        Triangle {
            p: dw(&u.blocks[..m - 1 - k]),
            q: dw(&v.blocks[..k]),
            r: dw(&v.blocks[k + 1..]),
            a: one(&u.blocks[m - 1 - k]),
            b: one(&v.blocks[k]),
            c: dw(&[(*alpha, c)]),
        }
    } else if k > 0 {
        Triangle {
            p: dw(&u.blocks[..m - k]),
            q: dw(&v.blocks[..k - 1]),
            r: dw(&v.blocks[k..]),
            a: one(&u.blocks[m - k]),
            b: one(&v.blocks[k - 1]),
            c: DeltaWord::default(),
        }
    } else {
        Triangle {
            p: u.clone(),
            q: DeltaWord::default(),
            r: v.clone(),
            a: DeltaWord::default(),
            b: DeltaWord::default(),
            c: DeltaWord::default(),
        }
    }
}

/// Word equations over `Γ` whose solutions solve the product system.
#[derive(Debug, Clone)]
pub struct Split {
    /// The original variables keep their indices; fresh ones follow.
    pub strings: EquationSystem,
    /// Canonical strings of the extended solution.
    pub sigma: Solution,
    pub constraints: Vec<(Var, ParikhConstraint)>,
}

struct Splitter<'a> {
    spec: &'a ProductSpec,
    out: EquationSystem,
    values: Vec<DeltaWord>,
    constraints: Vec<(Var, ParikhConstraint)>,
}

impl Splitter<'_> {
    fn fresh(&mut self, prefix: &str, value: DeltaWord) -> VarRef {
        let mut n = self.out.variables.len();
        let name = loop {
            let name = format!("{prefix}{n}");
            if self.out.var(&name).is_none() {
                break name;
            }
            n += 1;
        };
        let v = self.out.declare(&name).expect("generated names are valid");
        self.values.push(value);
        v.pos()
    }

    fn value(&self, r: VarRef) -> DeltaWord {
        let d = &self.values[r.var.index()];
        if r.bar {
            d.inverse(self.spec)
        } else {
            d.clone()
        }
    }

    fn pinned(&mut self, prefix: &str, value: DeltaWord) -> VarRef {
        let p = parikh_of_delta(self.spec, &value);
        let v = self.fresh(prefix, value);
        self.constraints.push((v.var, ParikhConstraint::Exact(p)));
        v
    }

    /// Emits the word equations for `x y = z`.
    fn triangle(&mut self, x: VarRef, y: VarRef, z: VarRef) {
        let t = split_triangle(self.spec, &self.value(x), &self.value(y));
        let p = self.fresh("P", t.p);
        let q = self.fresh("Q", t.q);
        let r = self.fresh("R", t.r);
        let a = self.pinned("A", t.a);
        let b = self.pinned("B", t.b);
        let c = self.pinned("C", t.c);
        for (lhs, rhs) in [(x, vec![p, a, q.inverse()]), (y, vec![q, b, r]), (z, vec![p, c, r])] {
            self.out.equations.push(Equation { lhs: vec![lhs], rhs });
        }
    }

    /// A variable for the product of `side`, or `target` if given.
    fn chain(&mut self, side: &[VarRef], target: Option<VarRef>) -> VarRef {
        match side {
            [] => {
                let e = self.pinned("E", DeltaWord::default());
                if let Some(t) = target {
                    let e2 = self.pinned("E", DeltaWord::default());
                    self.triangle(e, e2, t);
                }
                e
            }
            [x] => {
                if let Some(t) = target {
                    let e = self.pinned("E", DeltaWord::default());
                    self.triangle(*x, e, t);
                }
                *x
            }
            _ => {
                let mut acc = side[0];
                for (i, &y) in side.iter().enumerate().skip(1) {
                    let z = match target {
                        Some(t) if i + 1 == side.len() => t,
                        _ => {
                            let value = super::reduce_product(self.spec, &self.value(acc), &self.value(y));
                            self.fresh("T", value)
                        }
                    };
                    self.triangle(acc, y, z);
                    acc = z;
                }
                acc
            }
        }
    }
}

/// Triangulates every equation and splits each triangle `XY = Z` into three
/// word equations with single-block variables pinned by constraints.
pub fn triangulate_and_split(sys: &ProductSystem, sigma: &Solution) -> Result<Split> {
    let values = check_solution(sys, sigma)?;
    let spec = &sys.spec;
    let mut out = EquationSystem::new(spec.alphabet.clone());
    for v in &sys.equations.variables {
        out.declare(v)?;
    }
    let mut s = Splitter {
        spec,
        out,
        values: values.into_iter().map(Option::unwrap_or_default).collect(),
        constraints: sys.constraints.clone(),
    };
    for e in &sys.equations.equations {
        if e.rhs.len() >= 2 || e.lhs.len() <= 1 {
            let l = s.chain(&e.lhs, None);
            s.chain(&e.rhs, Some(l));
        } else {
            let r = s.chain(&e.rhs, None);
            s.chain(&e.lhs, Some(r));
        }
    }
    let mut strings_sigma = Solution::new(&s.out);
    for (i, d) in s.values.iter().enumerate() {
        strings_sigma.set(Var(i as u32), spec.canonical(d));
    }
    Ok(Split { strings: s.out, sigma: strings_sigma, constraints: s.constraints })
}

/// A compressed assignment for a product system.
#[derive(Debug, Clone)]
pub struct Certificate<L> {
    pub slp: Slp<L>,
    pub bindings: Vec<Option<VarRef>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineStats {
    pub string_equations: usize,
    pub denotational_length: usize,
    pub classes: usize,
    pub generic_length: usize,
    pub solution_length: usize,
    pub ig_size: usize,
    pub compressed_size: usize,
    pub certificate_size: usize,
}

/// `w` with every run of equal letters as a power.
pub fn push_runs<L: Length>(slp: &mut Slp<L>, w: &Word) -> Result<VarRef> {
    let mut parts = Vec::new();
    let mut i = 0;
    let l = w.letters();
    while i < l.len() {
        let mut j = i;
        while j < l.len() && l[j] == l[i] {
            j += 1;
        }
        let x = slp.letter_var(l[i]);
        parts.push(slp.push_power(x, &L::from_count(j - i))?);
        i = j;
    }
    Ok(slp.concat_all(&parts)?.unwrap_or_else(|| slp.empty_var()))
}

/// Elements for `n ≥ 1` nontrivial blocks of factor `alpha` multiplying to
/// `g`: `h′, h, …, h, g·h^{−(n−1)}` style, as `(first, middle, last)`.
fn fill(spec: &ProductSpec, alpha: usize, n: u64, g: &[i64]) -> Result<(Vec<i64>, Vec<i64>, Vec<i64>)> {
    let f = &spec.factors[alpha];
    let h = f.unit();
    if n == 1 {
        return Ok((g.to_vec(), h.clone(), g.to_vec()));
    }
    let rest = f.add(g, &f.scale(&h, -(n as i64 - 1)));
    if !f.is_identity(&rest) {
        return Ok((h.clone(), h, rest));
    }
    let other = f
        .other_than(&h)
        .ok_or_else(|| Error::InternalInvariantViolation("a two-element factor with a forced product".into()))?;
    let last = f.add(&f.add(g, &f.scale(&h, -(n as i64 - 2))), &f.neg(&other));
    Ok((other, h, last))
}

/// A word with the same `π` as the interior runs of `w`, as periodic runs.
fn parikh_donor<L: Length>(spec: &ProductSpec, slp: &mut Slp<L>, w: &Word) -> Result<VarRef> {
    let runs = spec.runs(w);
    if runs.len() <= 3 {
        return push_runs(slp, w);
    }
    let inner = &runs[1..runs.len() - 1];
    let seq: Vec<usize> = inner.iter().map(|r| r.0).collect();
    let nf = spec.factors.len();
    let mut count = vec![0u64; nf];
    let mut target: Vec<Vec<i64>> = spec.factors.iter().map(|f| f.identity()).collect();
    for &(a, from, to) in inner {
        count[a] += 1;
        let g = spec.run_elem(a, &w.letters()[from..to]);
        target[a] = spec.factors[a].add(&target[a], &g);
    }
    let fills: Vec<Option<(Vec<i64>, Vec<i64>, Vec<i64>)>> =
        (0..nf).map(|a| (count[a] > 0).then(|| fill(spec, a, count[a], &target[a])).transpose()).collect::<Result<_>>()?;
    let elem = |a: usize, ord: u64| -> &Vec<i64> {
        let (first, mid, last) = fills[a].as_ref().unwrap();
        if ord + 1 == count[a] {
            last
        } else if ord == 0 {
            first
        } else {
            mid
        }
    };
    let (rw, _) = reorder(&seq)?;
    let mut seen = vec![0u64; nf];
    let mut parts = vec![push_runs(slp, &Word(w.letters()[runs[0].1..runs[0].2].to_vec()))?];
    let mut pair_cache: BTreeMap<(usize, usize), VarRef> = BTreeMap::new();
    for &(x, y, e) in &rw.runs {
        let (ox, oy) = (seen[x], seen[y]);
        let mut marks = Vec::new();
        for (o, k) in [(ox, count[x]), (oy, count[y])] {
            if o == 0 {
                marks.push(0);
            }
            if k - 1 - o < e {
                marks.push(k - 1 - o);
            }
        }
        marks.sort();
        marks.dedup();
        let mut i = 0;
        for m in marks.into_iter().chain([e]) {
            if m > i {
                let pv = match pair_cache.get(&(x, y)) {
                    Some(&v) => v,
                    None => {
                        let bx = push_block(slp, spec, x, &spec.factors[x].unit())?;
                        let by = push_block(slp, spec, y, &spec.factors[y].unit())?;
                        let v = slp.concat(bx, by)?;
                        pair_cache.insert((x, y), v);
                        v
                    }
                };
                parts.push(slp.push_power(pv, &L::from_count((m - i) as usize))?);
            }
            if m < e {
                parts.push(push_block(slp, spec, x, elem(x, ox + m))?);
                parts.push(push_block(slp, spec, y, elem(y, oy + m))?);
            }
            i = m + 1;
        }
        seen[x] += e;
        seen[y] += e;
    }
    if let Some(t) = rw.tail {
        parts.push(push_block(slp, spec, t, elem(t, seen[t]))?);
    }
    let last = runs[runs.len() - 1];
    parts.push(push_runs(slp, &Word(w.letters()[last.1..last.2].to_vec()))?);
    Ok(slp.concat_all(&parts)?.expect("non-empty donor"))
}

enum Donors {
    Parikh,
    Original,
}

fn compress_pipeline<L: Length>(sys: &ProductSystem, sigma: &Solution, donors: Donors) -> Result<(Certificate<L>, PipelineStats)> {
    let spec = &sys.spec;
    let split = triangulate_and_split(sys, sigma)?;
    let mut dec = compute_cuts(&split.strings, &split.sigma)?;
    maximal_free_intervals(&mut dec, &spec.alphabet);
    let g = generic_solution(&dec, &split.strings);
    let comp = compress_generic::<L>(&dec, &g, &split.strings)?;
    let mut donor: Slp<L> = Slp::new(spec.alphabet.clone());
    let mut omega: Vec<Option<VarRef>> = vec![None; g.alphabet.len()];
    for c in g.alphabet.positives() {
        let w = &g.omega[c.index()];
        omega[c.index()] = Some(match donors {
            Donors::Parikh if g.alphabet.bar(c) != c => parikh_donor(spec, &mut donor, w)?,
            _ => push_runs(&mut donor, w)?,
        });
    }
    let sub = substitute_intervals(&comp.slp, &donor, &omega)?;
    let mut slp = sub.slp;
    let n = sys.equations.variables.len();
    let mut roots = Vec::new();
    let mut bound = Vec::new();
    for x in (0..n as u32).map(Var) {
        if !sys.needed(x) {
            continue;
        }
        let r = match comp.vars[x.index()] {
            Some(v) => sub.map[v.var.index()].flipped(v.bar),
            None => push_runs(&mut slp, split.sigma.get(x).expect("needed variables have values"))?,
        };
        roots.push(r);
        bound.push(x);
    }
    let (mut slp, images) = slp.prune(&roots);
    let mut bindings = vec![None; n];
    for (x, r) in bound.into_iter().zip(images) {
        if !r.bar && slp.var(sys.equations.name(x)).is_none() {
            let _ = slp.rename(r.var, sys.equations.name(x));
        }
        bindings[x.index()] = Some(r);
    }
    let stats = PipelineStats {
        string_equations: split.strings.equations.len(),
        denotational_length: split.strings.denotational_length(),
        classes: dec.classes_up_to_involution(),
        generic_length: g.length(),
        solution_length: dec.words.iter().map(Word::len).sum(),
        ig_size: comp.ig_size,
        compressed_size: comp.slp.size(),
        certificate_size: slp.size(),
    };
    Ok((Certificate { slp, bindings }, stats))
}

/// A certificate whose values have the same extended Parikh images as `σ`
/// and solve the system, built from periodic donors for the free intervals.
pub fn compress_solution_parikh<L: Length>(sys: &ProductSystem, sigma: &Solution) -> Result<(Certificate<L>, PipelineStats)> {
    compress_pipeline(sys, sigma, Donors::Parikh)
}

/// A certificate evaluating to the canonical form of `σ` itself.
pub fn compress_solution_alphabetic<L: Length>(
    sys: &ProductSystem,
    sigma: &Solution,
) -> Result<(Certificate<L>, PipelineStats)> {
    compress_pipeline(sys, sigma, Donors::Original)
}

/// Checks a certificate without decompressing: every binding is reduced
/// with canonical blocks, every equation holds in `F` and every constraint
/// holds.
pub fn verify_certificate<L: Length>(sys: &ProductSystem, cert: &Certificate<L>) -> Result<bool> {
    let spec = &sys.spec;
    let n = sys.equations.variables.len();
    for x in (0..n as u32).map(Var) {
        if sys.needed(x) && cert.bindings.get(x.index()).copied().flatten().is_none() {
            return Err(Error::MissingAssignment(sys.equations.name(x).to_string()));
        }
    }
    if cert.slp.alphabet() != &spec.alphabet {
        return Ok(false);
    }
    if cert.bindings.iter().flatten().any(|b| b.var.index() >= cert.slp.num_vars()) {
        return Err(Error::UnknownVariable("binding outside the program".into()));
    }
    let mut slp = cert.slp.clone();
    let mut analysis = BlockAnalysis::new();
    for &b in cert.bindings.iter().flatten() {
        if analysis.check(spec, &slp, b)? != (true, true) {
            return Ok(false);
        }
    }
    let bind = |r: VarRef| cert.bindings[r.var.index()].unwrap().flipped(r.bar);
    for e in &sys.equations.equations {
        let l: Vec<VarRef> = e.lhs.iter().map(|&r| bind(r)).collect();
        let r: Vec<VarRef> = e.rhs.iter().map(|&r| bind(r)).collect();
        let lv = reduce_all(spec, &mut slp, &mut analysis, &l)?;
        let rv = reduce_all(spec, &mut slp, &mut analysis, &r)?;
        if !equal_eval(&slp, lv, rv) {
            return Ok(false);
        }
    }
    for (x, c) in &sys.constraints {
        let p: ExtendedParikhImage = analysis.parikh(spec, &slp, bind(x.pos()))?;
        if !c.holds(&p) {
            return Ok(false);
        }
    }
    Ok(true)
}
