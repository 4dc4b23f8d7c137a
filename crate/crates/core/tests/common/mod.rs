#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use slpwq::alphabet::{Alphabet, Letter, VarRef, Word};
use slpwq::equations::*;
use slpwq::product::{parikh_of_word, ParikhConstraint, ProductSystem, RunWord, Shape};
use slpwq::query::{equal_eval, Question};
use slpwq::slp::{Rule, Slp};

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a/ā`, `b/b̄`, ... for the first `k` letters of the latin alphabet.
pub fn group_alphabet(k: usize) -> Alphabet {
    let mut al = Alphabet::new();
    for c in "abcdefgh".chars().take(k) {
        al.add_pair(&c.to_string(), &format!("{c}\u{304}")).unwrap();
    }
    al
}

/// A random SLP whose variables all evaluate to at most `max_len` letters.
pub fn random_slp(rng: &mut TestRng, letters: usize, vars: usize, max_len: u64) -> Slp<u64> {
    let al = group_alphabet(letters);
    let positives: Vec<Letter> = al.positives().collect();
    let mut slp = Slp::new(al.clone());
    for &a in &positives {
        slp.push_terminal(None, Some(a));
    }
    if rng.gen_bool(0.3) {
        slp.push_terminal(None, None);
    }
    while slp.num_vars() < vars {
        let n = slp.num_vars() as u32;
        // prefer recent variables so that words grow
        let pick = |rng: &mut TestRng| {
            let lo = n.saturating_sub(6);
            let v = if rng.gen_bool(0.7) { rng.gen_range(lo..n) } else { rng.gen_range(0..n) };
            VarRef { var: slpwq::Var(v), bar: rng.gen_bool(0.3) }
        };
        let (y, z) = (pick(rng), pick(rng));
        if slp.len(y) + slp.len(z) <= max_len {
            slp.push_pair(None, y, z).unwrap();
        } else if rng.gen_bool(0.05) {
            let a = *positives.choose(rng).unwrap();
            slp.push_terminal(None, Some(a));
        }
    }
    slp
}

/// Naive recursive evaluation straight from the rules.
pub fn naive_eval(slp: &Slp<u64>, x: VarRef) -> Vec<Letter> {
    let al = slp.alphabet();
    let mut memo: Vec<Option<Vec<Letter>>> = vec![None; slp.num_vars()];
    for v in slp.vars() {
        let w = match slp.rule(v) {
            Rule::Terminal(a) => a.into_iter().collect(),
            Rule::Pair(y, z) => {
                let get = |r: VarRef| {
                    let w = memo[r.var.index()].clone().unwrap();
                    if r.bar {
                        w.iter().rev().map(|&a| al.bar(a)).collect()
                    } else {
                        w
                    }
                };
                let mut w = get(y);
                w.extend(get(z));
                w
            }
        };
        memo[v.index()] = Some(w);
        if v == x.var {
            break;
        }
    }
    let w = memo[x.var.index()].clone().unwrap();
    if x.bar {
        w.iter().rev().map(|&a| al.bar(a)).collect()
    } else {
        w
    }
}

/// Naive free reduction with a stack.
pub fn naive_reduce(al: &Alphabet, w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for &a in w {
        if out.last() == Some(&al.bar(a)) {
            out.pop();
        } else {
            out.push(a);
        }
    }
    out
}

pub fn word(w: Vec<Letter>) -> Word {
    Word(w)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_exponent(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// A random interval grammar with words of at most `max_len` letters.
pub fn random_ig(rng: &mut TestRng, letters: usize, vars: usize, max_len: u64) -> slpwq::ig::IntervalGrammar<u64> {
    use slpwq::ig::{IgRule, IgSlice, IntervalGrammar};
    let al = group_alphabet(letters);
    let positives: Vec<Letter> = al.positives().collect();
    let mut ig = IntervalGrammar::new(al);
    let mut k = 0;
    let mut name = || {
        k += 1;
        format!("V{k}")
    };
    for &a in &positives {
        ig.push(&name(), IgRule::Terminal(Some(a))).unwrap();
    }
    while ig.num_vars() < vars {
        let n = ig.num_vars() as u32;
        let slice = |rng: &mut TestRng| {
            let lo_var = n.saturating_sub(8);
            let v = if rng.gen_bool(0.7) { rng.gen_range(lo_var..n) } else { rng.gen_range(0..n) };
            let var = VarRef { var: slpwq::Var(v), bar: rng.gen_bool(0.3) };
            let len = *ig.len(var);
            // trim a little from each end so that words keep growing
            let (lo, hi) = if rng.gen_bool(0.3) {
                (0, len)
            } else if rng.gen_bool(0.8) {
                let a = rng.gen_range(0..=len / 4);
                let b = len - rng.gen_range(0..=(len - a) / 4);
                (a, b)
            } else {
                let a = rng.gen_range(0..=len);
                let b = rng.gen_range(a..=len);
                (a, b)
            };
            IgSlice { var, lo, hi }
        };
        let s = slice(rng);
        let rule = if rng.gen_bool(0.15) {
            IgRule::Slice(s)
        } else {
            let t = slice(rng);
            if (s.hi - s.lo) + (t.hi - t.lo) > max_len {
                continue;
            }
            IgRule::SlicePair(s, t)
        };
        if rng.gen_bool(0.02) {
            ig.push(&name(), IgRule::Terminal(None)).unwrap();
            continue;
        }
        ig.push(&name(), rule).unwrap();
    }
    ig
}

/// Naive evaluation of an interval grammar: full words, bottom-up.
pub fn naive_ig_eval(ig: &slpwq::ig::IntervalGrammar<u64>) -> Vec<Vec<Letter>> {
    use slpwq::ig::IgRule;
    let al = ig.alphabet();
    let mut words: Vec<Vec<Letter>> = Vec::new();
    for v in ig.vars() {
        let get = |words: &Vec<Vec<Letter>>, s: &slpwq::ig::IgSlice<u64>| -> Vec<Letter> {
            let w = &words[s.var.var.index()];
            let w: Vec<Letter> = if s.var.bar { w.iter().rev().map(|&a| al.bar(a)).collect() } else { w.clone() };
            w[s.lo as usize..s.hi as usize].to_vec()
        };
        let w = match ig.rule(v) {
            IgRule::Terminal(a) => a.iter().copied().collect(),
            IgRule::Slice(s) => get(&words, s),
            IgRule::SlicePair(s, t) => {
                let mut w = get(&words, s);
                w.extend(get(&words, t));
                w
            }
        };
        words.push(w);
    }
    words
}

/// A random system of one or two equations with a planted solution, every
/// generic word of length at most `max_m` and `d ≤ max_d`.
pub fn random_system(rng: &mut TestRng, max_m: usize, max_d: usize) -> (EquationSystem, Solution) {
    use slpwq::equations::{EquationSystem, Solution};
    'retry: loop {
        let al = group_alphabet(2);
        let letters: Vec<Letter> = al.letters().collect();
        let mut values: Vec<Word> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let w = if !values.is_empty() && rng.gen_bool(0.3) {
                let base = values.choose(rng).unwrap().clone();
                if rng.gen_bool(0.5) { base.inverse(&al) } else { base.concat(&base) }
            } else {
                Word((0..rng.gen_range(0..=5)).map(|_| *letters[..rng.gen_range(1..=4)].choose(rng).unwrap()).collect())
            };
            values.push(w);
        }
        let value = |values: &[Word], x: usize, bar: bool| if bar { values[x].inverse(&al) } else { values[x].clone() };
        let mut text: Vec<(String, String)> = Vec::new();
        let mut d = 0;
        for _ in 0..rng.gen_range(1..=2) {
            let mut lhs = Vec::new();
            let mut w: Vec<Letter> = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                let x = rng.gen_range(0..values.len());
                let bar = rng.gen_bool(0.3);
                w.extend(value(&values, x, bar).0);
                lhs.push(format!("{}X{}", if bar { "~" } else { "" }, x));
            }
            if w.is_empty() || w.len() > max_m {
                continue 'retry;
            }
            let mut rhs = Vec::new();
            let mut p = 0;
            while p < w.len() {
                let fits: Vec<(usize, bool)> = (0..values.len())
                    .flat_map(|x| [(x, false), (x, true)])
                    .filter(|&(x, bar)| {
                        let v = value(&values, x, bar);
                        !v.is_empty() && w[p..].starts_with(v.letters())
                    })
                    .collect();
                let (x, bar) = if !fits.is_empty() && rng.gen_bool(0.6) {
                    *fits.choose(rng).unwrap()
                } else {
                    let n = rng.gen_range(1..=3.min(w.len() - p));
                    values.push(Word(w[p..p + n].to_vec()));
                    (values.len() - 1, false)
                };
                p += values[x].len();
                rhs.push(format!("{}X{}", if bar { "~" } else { "" }, x));
            }
            d += lhs.len() + rhs.len();
            text.push((lhs.join(" "), rhs.join(" ")));
        }
        if d > max_d {
            continue;
        }
        let mut s = EquationSystem::new(al);
        for (l, r) in &text {
            s.add_equation(l, r).unwrap();
        }
        let mut sigma = Solution::new(&s);
        for (x, w) in values.into_iter().enumerate() {
            if let Some(v) = s.var(&format!("X{x}")) {
                sigma.set(v, w);
            }
        }
        return (s, sigma);
    }
}

/// `Z * Z` with generators `a` (factor `x`) and `b` (factor `y`).
pub fn zz_spec() -> slpwq::product::ProductSpec {
    let mut spec = slpwq::product::ProductSpec::new();
    spec.add_factor("x", 1, &[], Some(&["a"])).unwrap();
    spec.add_factor("y", 1, &[], Some(&["b"])).unwrap();
    spec
}

/// `k ≤ 3` factors alternating between `Z` and `Z/6`.
pub fn mixed_spec(k: usize) -> slpwq::product::ProductSpec {
    let mut spec = slpwq::product::ProductSpec::new();
    for (i, name) in ["x", "y", "z"].into_iter().take(k).enumerate() {
        if i % 2 == 0 {
            spec.add_factor(name, 1, &[], None).unwrap();
        } else {
            spec.add_factor(name, 0, &[6], None).unwrap();
        }
    }
    spec
}

/// A random nontrivial element with coordinates up to `max`.
pub fn random_elem(rng: &mut TestRng, spec: &slpwq::product::ProductSpec, alpha: usize, max: i64) -> Vec<i64> {
    let f = &spec.factors[alpha];
    loop {
        let g = f.normalize((0..f.dim()).map(|_| rng.gen_range(-max..=max)).collect());
        if !f.is_identity(&g) {
            return g;
        }
    }
}

/// A random reduced word with `blocks` blocks.
pub fn random_delta(rng: &mut TestRng, spec: &slpwq::product::ProductSpec, blocks: usize, max: i64) -> slpwq::product::DeltaWord {
    let mut d = slpwq::product::DeltaWord::default();
    let k = spec.factors.len();
    let blocks = if k == 1 { blocks.min(1) } else { blocks };
    for _ in 0..blocks {
        let alpha = loop {
            let a = rng.gen_range(0..k);
            if d.blocks.last().is_none_or(|b| b.0 != a) {
                break a;
            }
        };
        let g = random_elem(rng, spec, alpha, max);
        d.blocks.push((alpha, g));
    }
    d
}

/// A program for `w` with random split points.
pub fn random_tree<L: slpwq::Length>(rng: &mut TestRng, slp: &mut Slp<L>, w: &[Letter]) -> VarRef {
    match w.len() {
        0 => slp.empty_var(),
        1 => slp.letter_var(w[0]),
        n => {
            let k = rng.gen_range(1..n);
            let y = random_tree(rng, slp, &w[..k]);
            let z = random_tree(rng, slp, &w[k..]);
            slp.push_pair(None, y, z).unwrap().pos()
        }
    }
}

/// A planted system over `mixed_spec(k)` with every value of at most
/// `blocks` blocks of exponent at most `max`, and its canonical solution.
pub fn planted_product_system(
    rng: &mut TestRng,
    k: usize,
    blocks: usize,
    max: i64,
) -> (slpwq::product::ProductSystem, Solution) {
    use slpwq::product::*;
    let spec = mixed_spec(k);
    let mut values: Vec<DeltaWord> = Vec::new();
    for _ in 0..rng.gen_range(2..=3) {
        let n = rng.gen_range(0..=blocks);
        values.push(random_delta(rng, &spec, n, max));
    }
    let mut eqs: Vec<(String, String)> = Vec::new();
    let value = |values: &[DeltaWord], i: usize, bar: bool| if bar { values[i].inverse(&spec) } else { values[i].clone() };
    for _ in 0..rng.gen_range(1..=2) {
        let i = rng.gen_range(0..values.len());
        let j = rng.gen_range(0..values.len());
        let (bi, bj) = (rng.gen_bool(0.3), rng.gen_bool(0.3));
        let name = |i: usize, bar: bool| format!("{}X{i}", if bar { "~" } else { "" });
        let prod = reduce_product(&spec, &value(&values, i, bi), &value(&values, j, bj));
        if rng.gen_bool(0.5) {
            values.push(prod);
            eqs.push((format!("{} {}", name(i, bi), name(j, bj)), name(values.len() - 1, false)));
        } else {
            // X Y = U V with V = U⁻¹ X Y
            let u = rng.gen_range(0..values.len());
            let v = reduce_product(&spec, &values[u].inverse(&spec), &prod);
            values.push(v);
            eqs.push((format!("{} {}", name(i, bi), name(j, bj)), format!("{} {}", name(u, false), name(values.len() - 1, false))));
        }
    }
    let mut sys = ProductSystem::new(spec.clone());
    for (l, r) in &eqs {
        sys.add_equation(l, r).unwrap();
    }
    let mut sigma = Solution::new(&sys.equations);
    for (i, d) in values.iter().enumerate() {
        let Some(x) = sys.equations.var(&format!("X{i}")) else { continue };
        sigma.set(x, spec.canonical(d));
        let name = format!("X{i}");
        let p = parikh_of_delta(&spec, d);
        match rng.gen_range(0..3) {
            0 => sys.add_constraint(&name, ParikhConstraint::Exact(p)).unwrap(),
            1 => sys
                .add_constraint(&name, ParikhConstraint::Alphabetic { alph: p.support(), first: p.first, last: p.last })
                .unwrap(),
            _ if !d.is_empty() => sys.add_constraint(&name, ParikhConstraint::NotIdentity).unwrap(),
            _ => {}
        }
    }
    (sys, sigma)
}

pub struct Dsu(pub Vec<usize>);

impl Dsu {
    pub fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    pub fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// The relation `≈` over all oriented intervals, straight from its
/// definition: intervals inside an occurrence span are identified with their
/// images in every other occurrence of the same variable.
pub struct Closure {
    index: HashMap<(usize, usize, usize), usize>,
    dsu: Dsu,
}

impl Closure {
    pub fn new(dec: &CutDecomposition) -> Self {
        let mut index = HashMap::new();
        for (e, w) in dec.words.iter().enumerate() {
            for a in 0..=w.len() {
                for b in 0..=w.len() {
                    if a != b {
                        let n = index.len();
                        index.insert((e, a, b), n);
                    }
                }
            }
        }
        let mut dsu = Dsu((0..index.len()).collect());
        let occ = &dec.occurrences;
        for (i, oi) in occ.iter().enumerate() {
            for (j, oj) in occ.iter().enumerate() {
                if i == j || oi.var.var != oj.var.var {
                    continue;
                }
                let reflect = oi.var.bar != oj.var.bar;
                let t = |p: usize| if reflect { oj.right - (p - oi.left) } else { oj.left + (p - oi.left) };
                for a in oi.left..=oi.right {
                    for b in oi.left..=oi.right {
                        if a != b {
                            dsu.union(index[&(oi.eq, a, b)], index[&(oj.eq, t(a), t(b))]);
                        }
                    }
                }
            }
        }
        Closure { index, dsu }
    }

    pub fn root(&mut self, e: usize, a: usize, b: usize) -> usize {
        let i = self.index[&(e, a, b)];
        self.dsu.find(i)
    }

    /// Maximal free intervals as `(eq, start, end)`.
    pub fn maximal_free(&mut self, dec: &CutDecomposition) -> BTreeSet<(usize, usize, usize)> {
        let mut blocked: BTreeSet<usize> = BTreeSet::new();
        let keys: Vec<_> = self.index.keys().copied().collect();
        for (e, a, b) in keys {
            let (lo, hi) = (a.min(b), a.max(b));
            if dec.cuts[e].iter().any(|&c| lo < c && c < hi) {
                blocked.insert(self.root(e, a, b));
            }
        }
        let mut free = BTreeSet::new();
        for (e, w) in dec.words.iter().enumerate() {
            for a in 0..w.len() {
                for b in a + 1..=w.len() {
                    if !blocked.contains(&self.root(e, a, b)) {
                        free.insert((e, a, b));
                    }
                }
            }
        }
        free.iter()
            .filter(|&&(e, a, b)| !free.iter().any(|&(e2, a2, b2)| e2 == e && a2 <= a && b <= b2 && (a2, b2) != (a, b)))
            .copied()
            .collect()
    }
}

/// `X A = A X` with `σ(A) = a`, `σ(X) = a^n`: every position is a derived
/// cut, so the generic word has `n + 1` letters.
pub fn commuting_power(n: usize) -> (EquationSystem, Solution) {
    let mut al = Alphabet::new();
    al.add_pair("a", "ā").unwrap();
    let mut s = EquationSystem::new(al);
    s.add_equation("X A", "A X").unwrap();
    let a = s.alphabet.letter("a").unwrap();
    let mut sigma = Solution::new(&s);
    sigma.set(s.var("X").unwrap(), Word(vec![a; n]));
    sigma.set(s.var("A").unwrap(), Word(vec![a]));
    (s, sigma)
}


pub fn random_question(rng: &mut TestRng, slp: &slpwq::SlpU64) -> Question<u64> {
    let n = slp.num_vars() as u32;
    let pick = |rng: &mut TestRng| VarRef { var: slpwq::Var(rng.gen_range(0..n)), bar: rng.gen_bool(0.3) };
    let (x, y) = (pick(rng), pick(rng));
    let (lx, ly) = (*slp.len(x), *slp.len(y));
    let len = rng.gen_range(0..=lx.min(ly));
    let i = rng.gen_range(0..=lx - len);
    let k = if rng.gen_bool(0.5) { rng.gen_range(0..=ly - len) } else { 0 };
    Question::new(x, i, i + len, y, k, k + len)
}

pub fn analyse(s: &EquationSystem, sigma: &Solution) -> (CutDecomposition, GenericSolution) {
    let mut dec = compute_cuts(s, sigma).unwrap();
    maximal_free_intervals(&mut dec, &s.alphabet);
    let g = generic_solution(&dec, s);
    (dec, g)
}

/// `σ̃(X)` written out directly next to the compressed program.
pub fn check_compressed(s: &EquationSystem, g: &GenericSolution, c: &Compressed<u64>) {
    let mut slp = c.slp.clone();
    for x in 0..s.variables.len() {
        let (Some(w), Some(v)) = (&g.sigma[x], c.vars[x]) else { panic!("variable without image") };
        let direct = slp.push_word(w).unwrap();
        assert!(equal_eval(&slp, v, direct), "{}", s.variables[x]);
        assert_eq!(&slp.eval(v, 1 << 20).unwrap(), w);
    }
}

/// Every reduced sequence over `k` letters of length `n`.
pub fn reduced_sequences(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w: Vec<usize>| {
                (0..k).filter(|&x| w.last() != Some(&x)).map(|x| [w.clone(), vec![x]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

pub fn counts(w: &[usize], k: usize) -> Vec<usize> {
    (0..k).map(|x| w.iter().filter(|&&y| y == x).count()).collect()
}

/// The shape promised for `w`, checked on the output runs.
pub fn conforms(w: &[usize], out: &RunWord, shape: Shape) -> bool {
    let (a, c, n) = (w[0], *w.last().unwrap(), w.len());
    let na = w.iter().filter(|&&x| x == a).count();
    let mut alph: Vec<usize> = w.to_vec();
    alph.sort();
    alph.dedup();
    let l = alph.len();
    let runs = &out.runs;
    match shape {
        Shape::Alternating => {
            let mut betas: Vec<usize> = runs.iter().map(|r| r.1).collect();
            betas.sort();
            betas.dedup();
            (2 * na == n + 1 || (2 * na == n && a != c))
                && runs.iter().all(|r| r.0 == a)
                && betas.len() == runs.len()
                && runs.len() < l
                && (out.tail.is_none() || out.tail == Some(a))
        }
        Shape::Balanced => {
            2 * na == n
                && c == a
                && runs[0].0 == a
                && runs[1..].iter().all(|r| r.1 == a)
                && runs.len() < l
                && out.tail.is_none()
        }
        Shape::General => 2 * na < n && runs[0].0 == a && runs.len() <= l * (l - 1) / 2,
    }
}

/// Adds an exact constraint for every variable with a value.
pub fn pin_all(sys: &mut ProductSystem, sigma: &Solution) {
    for (i, w) in sigma.words.iter().enumerate() {
        if let Some(w) = w {
            let name = sys.equations.variables[i].clone();
            sys.add_constraint(&name, ParikhConstraint::Exact(parikh_of_word(&sys.spec, w))).unwrap();
        }
    }
}

