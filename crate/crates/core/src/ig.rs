//! Interval grammars and their conversion to straight-line programs.
//!
//! Rules have the forms `X → a`, `X → Y[α,β]` and `X → Y[α,β] Z[γ,δ]` with
//! `Y, Z ∈ Ω`. The involution of `Y[α,β]` is `Ȳ[|Y|−β, |Y|−α]`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::alphabet::{is_variable_name, Alphabet, Letter, Named, Var, VarRef, Word};
use crate::error::{Error, Result};
use crate::num::{diff, Length};
use crate::slp::{topological_order, NameRef, Slp};

/// `var[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IgSlice<L> {
    pub var: VarRef,
    pub lo: L,
    pub hi: L,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IgRule<L> {
    Terminal(Option<Letter>),
    Slice(IgSlice<L>),
    SlicePair(IgSlice<L>, IgSlice<L>),
}

impl<L> IgRule<L> {
    fn slices(&self) -> impl Iterator<Item = &IgSlice<L>> {
        let (a, b) = match self {
            IgRule::Terminal(_) => (None, None),
            IgRule::Slice(s) => (Some(s), None),
            IgRule::SlicePair(s, t) => (Some(s), Some(t)),
        };
        a.into_iter().chain(b)
    }
}

/// A slice by name; `range: None` stands for the whole word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSlice<L> {
    pub var: NameRef,
    pub range: Option<(L, L)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawIgRule<L> {
    Terminal(Option<String>),
    Slice(RawSlice<L>),
    SlicePair(RawSlice<L>, RawSlice<L>),
}

/// An unvalidated interval grammar, in input order.
#[derive(Debug, Clone)]
pub struct IgBuilder<L> {
    pub alphabet: Alphabet,
    pub rules: Vec<(String, RawIgRule<L>)>,
}

impl<L: Length> IgBuilder<L> {
    pub fn new(alphabet: Alphabet) -> Self {
        IgBuilder { alphabet, rules: Vec::new() }
    }

    pub fn terminal(&mut self, x: &str, letter: Option<&str>) -> &mut Self {
        self.rules.push((x.to_string(), RawIgRule::Terminal(letter.map(str::to_string))));
        self
    }

    pub fn rule(&mut self, x: &str, rule: RawIgRule<L>) -> &mut Self {
        self.rules.push((x.to_string(), rule));
        self
    }

    pub fn build(&self) -> Result<IntervalGrammar<L>> {
        IntervalGrammar::validate(self)
    }
}

/// Shorthand for building raw slices in code: `"~Y"` with a range.
pub fn raw_slice<L>(name: &str, range: Option<(L, L)>) -> RawSlice<L> {
    let var = match name.strip_prefix('~') {
        Some(n) => NameRef::barred(n),
        None => NameRef::plain(name),
    };
    RawSlice { var, range }
}

/// A validated interval grammar; variables are in topological order.
#[derive(Debug, Clone)]
pub struct IntervalGrammar<L> {
    alphabet: Alphabet,
    names: Vec<String>,
    by_name: HashMap<String, Var>,
    rules: Vec<IgRule<L>>,
    lengths: Vec<L>,
    heights: Vec<u32>,
}

impl<L: Length> IntervalGrammar<L> {
    pub fn new(alphabet: Alphabet) -> Self {
        IntervalGrammar {
            alphabet,
            names: Vec::new(),
            by_name: HashMap::new(),
            rules: Vec::new(),
            lengths: Vec::new(),
            heights: Vec::new(),
        }
    }

    pub fn validate(raw: &IgBuilder<L>) -> Result<Self> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut names = Vec::with_capacity(raw.rules.len());
        for (i, (name, _)) in raw.rules.iter().enumerate() {
            if !is_variable_name(name) {
                return Err(Error::UnknownSymbol(format!("invalid variable name {name:?}")));
            }
            if index.insert(name.as_str(), i).is_some() {
                return Err(Error::DuplicateLhs(name.clone()));
            }
            names.push(name.clone());
        }
        let lookup = |s: &RawSlice<L>| -> Result<usize> {
            index.get(s.var.name.as_str()).copied().ok_or_else(|| {
                if is_variable_name(&s.var.name) {
                    Error::MissingRule(s.var.name.clone())
                } else {
                    Error::UnknownSymbol(s.var.name.clone())
                }
            })
        };
        let mut deps = Vec::with_capacity(raw.rules.len());
        for (_, rule) in &raw.rules {
            deps.push(match rule {
                RawIgRule::Terminal(Some(a)) => {
                    if raw.alphabet.letter(a).is_none() {
                        return Err(Error::UnknownSymbol(a.clone()));
                    }
                    vec![]
                }
                RawIgRule::Terminal(None) => vec![],
                RawIgRule::Slice(s) => vec![lookup(s)?],
                RawIgRule::SlicePair(s, t) => vec![lookup(s)?, lookup(t)?],
            });
        }
        let order = topological_order(&names, &deps)?;
        let mut ig = IntervalGrammar::new(raw.alphabet.clone());
        let mut new_index = vec![Var(0); names.len()];
        for old in order {
            let (name, rule) = &raw.rules[old];
            let slice = |s: &RawSlice<L>, ig: &IntervalGrammar<L>| -> IgSlice<L> {
                let var = VarRef { var: new_index[index[s.var.name.as_str()]], bar: s.var.bar };
                let (lo, hi) = s.range.clone().unwrap_or_else(|| (L::zero(), ig.len(var).clone()));
                IgSlice { var, lo, hi }
            };
            let rule = match rule {
                RawIgRule::Terminal(a) => IgRule::Terminal(a.as_ref().map(|a| raw.alphabet.letter(a).unwrap())),
                RawIgRule::Slice(s) => IgRule::Slice(slice(s, &ig)),
                RawIgRule::SlicePair(s, t) => IgRule::SlicePair(slice(s, &ig), slice(t, &ig)),
            };
            new_index[old] = ig.push(name, rule)?;
        }
        Ok(ig)
    }

    /// Appends a rule whose children already exist.
    pub fn push(&mut self, name: &str, rule: IgRule<L>) -> Result<Var> {
        if !is_variable_name(name) {
            return Err(Error::UnknownSymbol(format!("invalid variable name {name:?}")));
        }
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateLhs(name.to_string()));
        }
        let mut len = L::zero();
        let mut height = 0;
        match &rule {
            IgRule::Terminal(a) => {
                if a.is_some() {
                    len = L::one();
                }
            }
            _ => {
                for s in rule.slices() {
                    if s.var.var.index() >= self.rules.len() {
                        return Err(Error::UnknownVariable(format!("child of {name}")));
                    }
                    let n = self.len(s.var);
                    if s.lo > s.hi || &s.hi > n {
                        return Err(Error::IndexOutOfRange(format!(
                            "{name}: {}[{},{}] with |{}| = {n}",
                            self.display(s.var),
                            s.lo,
                            s.hi,
                            self.display(s.var)
                        )));
                    }
                    len = len.checked_add(&diff(&s.hi, &s.lo)).ok_or(Error::LengthOverflow)?;
                    height = height.max(self.height(s.var));
                }
            }
        }
        let var = Var(self.rules.len() as u32);
        self.by_name.insert(name.to_string(), var);
        self.names.push(name.to_string());
        self.rules.push(rule);
        self.lengths.push(len);
        self.heights.push(height + 1);
        Ok(var)
    }

    /// The same words as an interval grammar with full-range slices.
    pub fn from_slp(slp: &Slp<L>) -> Self {
        let mut ig = IntervalGrammar::new(slp.alphabet().clone());
        for v in slp.vars() {
            let rule = match slp.rule(v) {
                crate::slp::Rule::Terminal(a) => IgRule::Terminal(a),
                crate::slp::Rule::Pair(y, z) => IgRule::SlicePair(
                    IgSlice { var: y, lo: L::zero(), hi: slp.len(y).clone() },
                    IgSlice { var: z, lo: L::zero(), hi: slp.len(z).clone() },
                ),
            };
            ig.push(slp.name(v), rule).expect("an SLP is an interval grammar");
        }
        ig
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_vars(&self) -> usize {
        self.rules.len()
    }

    /// Number of symbols on right-hand sides.
    pub fn size(&self) -> usize {
        self.rules
            .iter()
            .map(|r| match r {
                IgRule::Terminal(_) | IgRule::Slice(_) => 1,
                IgRule::SlicePair(..) => 2,
            })
            .sum()
    }

    pub fn vars(&self) -> impl DoubleEndedIterator<Item = Var> + ExactSizeIterator + '_ {
        (0..self.rules.len() as u32).map(Var)
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.by_name.get(name).copied()
    }

    pub fn var_ref(&self, text: &str) -> Result<VarRef> {
        let (name, bar) = match text.strip_prefix('~') {
            Some(n) => (n, true),
            None => (text, false),
        };
        self.var(name)
            .map(|var| VarRef { var, bar })
            .ok_or_else(|| Error::UnknownVariable(text.to_string()))
    }

    pub fn name(&self, x: Var) -> &str {
        &self.names[x.index()]
    }

    pub fn display(&self, x: VarRef) -> String {
        Named { name: self.name(x.var), bar: x.bar }.to_string()
    }

    pub fn rule(&self, x: Var) -> &IgRule<L> {
        &self.rules[x.index()]
    }

    pub fn len(&self, x: VarRef) -> &L {
        &self.lengths[x.var.index()]
    }

    pub fn height(&self, x: VarRef) -> u32 {
        self.heights[x.var.index()]
    }

    pub fn max_height(&self) -> u32 {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    /// The slices whose concatenation is `eval(x)`, oriented.
    fn pieces(&self, x: VarRef) -> Vec<IgSlice<L>> {
        let flip = |s: &IgSlice<L>| {
            let n = self.len(s.var);
            IgSlice { var: s.var.inverse(), lo: diff(n, &s.hi), hi: diff(n, &s.lo) }
        };
        let mut out: Vec<IgSlice<L>> = self.rules[x.var.index()].slices().cloned().collect();
        if x.bar {
            out = out.iter().rev().map(flip).collect();
        }
        out
    }

    /// `eval(x)[from, to]`, descending the rules without materializing `eval(x)`.
    pub fn extract(&self, x: VarRef, from: &L, to: &L, cap: usize) -> Result<Word> {
        if from > to || to > self.len(x) {
            return Err(Error::OutOfRange(format!("[{from},{to}] in {}", self.display(x))));
        }
        let n = diff(to, from);
        if n.as_count().is_none_or(|n| n > cap) {
            return Err(Error::CapExceeded { len: n.to_string(), cap });
        }
        let mut out = Vec::with_capacity(n.as_count().unwrap());
        let mut stack = vec![(x, from.clone(), to.clone())];
        while let Some((v, a, b)) = stack.pop() {
            if a == b {
                continue;
            }
            if let IgRule::Terminal(t) = &self.rules[v.var.index()] {
                let t = t.expect("non-empty terminal");
                out.push(if v.bar { self.alphabet.bar(t) } else { t });
                continue;
            }
            let mut todo = Vec::new();
            let mut offset = L::zero();
            for p in self.pieces(v) {
                let plen = diff(&p.hi, &p.lo);
                let end = offset.clone() + plen;
                // overlap of [a,b] with [offset,end]
                let lo = if a > offset { a.clone() } else { offset.clone() };
                let hi = if b < end { b.clone() } else { end.clone() };
                if lo < hi {
                    todo.push((p.var, p.lo.clone() + diff(&lo, &offset), p.lo.clone() + diff(&hi, &offset)));
                }
                offset = end;
            }
            stack.extend(todo.into_iter().rev());
        }
        Ok(Word(out))
    }

    pub fn eval(&self, x: VarRef, cap: usize) -> Result<Word> {
        self.extract(x, &L::zero(), &self.len(x).clone(), cap)
    }
}

/// Counters describing one IG→SLP conversion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConversionStats {
    /// Replacement steps performed.
    pub steps: usize,
    /// Total weight of the symbols occurring in the input.
    pub initial_weight: u128,
    /// Largest pending weight seen during the run.
    pub peak_weight: u128,
    /// Rules in the output program.
    pub rules: usize,
    /// `h(S)·|Ω₊|` of the input.
    pub height_times_vars: u128,
    /// `|Ω₊|²` of the input.
    pub vars_squared: u128,
}

/// Result of [`ig_to_slp`].
#[derive(Debug, Clone)]
pub struct Converted<L> {
    pub slp: Slp<L>,
    /// Output variable for each input variable, indexed by `Var`.
    pub vars: Vec<VarRef>,
    /// Output variable for every slice occurring on a right-hand side,
    /// keyed by positive variable and interval.
    pub slices: BTreeMap<(Var, L, L), VarRef>,
    pub stats: ConversionStats,
}

impl<L: Length> Converted<L> {
    /// The output variable evaluating to `eval(y)[lo, hi]`, if that slice
    /// occurs in the input grammar (or is a whole variable).
    pub fn slice(&self, ig: &IntervalGrammar<L>, y: VarRef, lo: &L, hi: &L) -> Option<VarRef> {
        let n = ig.len(y);
        if lo.is_zero() && hi == n {
            return Some(self.vars[y.var.index()].flipped(y.bar));
        }
        let (lo, hi) = if y.bar { (diff(n, hi), diff(n, lo)) } else { (lo.clone(), hi.clone()) };
        self.slices.get(&(y.var, lo, hi)).map(|r| r.flipped(y.bar))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Base {
    Ig(Var),
    Work(usize),
}

type Key<L> = (Base, L, L);

#[derive(Debug, Clone)]
enum Part<L> {
    Ref(usize, bool),
    Sym(Key<L>, bool),
}

#[derive(Debug, Clone)]
enum WorkRule<L> {
    Terminal(Option<Letter>),
    Pair(Part<L>, Part<L>),
}

#[derive(Debug, Clone)]
enum Resolution<L> {
    Done(usize, bool),
    Alias(Key<L>, bool),
}

struct Converter<'a, L> {
    ig: &'a IntervalGrammar<L>,
    work: Vec<(WorkRule<L>, L, u32, Option<String>)>,
    terminals: HashMap<Option<Letter>, usize>,
    pending: BTreeSet<(u32, String, L, L, Base)>,
    resolved: HashMap<Key<L>, Resolution<L>>,
    weight: u128,
    stats: ConversionStats,
}

impl<'a, L: Length> Converter<'a, L> {
    fn base_len(&self, b: Base) -> &L {
        match b {
            Base::Ig(v) => self.ig.len(v.pos()),
            Base::Work(i) => &self.work[i].1,
        }
    }

    fn base_height(&self, b: Base) -> u32 {
        match b {
            Base::Ig(v) => self.ig.height(v.pos()),
            Base::Work(i) => self.work[i].2,
        }
    }

    fn base_name(&self, b: Base) -> String {
        match b {
            Base::Ig(v) => self.ig.name(v).to_string(),
            Base::Work(i) => match &self.work[i].3 {
                Some(n) => n.clone(),
                None => format!("#{i:012}"),
            },
        }
    }

    /// Weight `H`: the height for a prefix (or, through the dual rule, a
    /// suffix), twice the height otherwise.
    fn weight_of(&self, key: &Key<L>) -> u128 {
        let h = self.base_height(key.0) as u128;
        if key.1.is_zero() || &key.2 == self.base_len(key.0) {
            h
        } else {
            2 * h
        }
    }

    fn terminal(&mut self, a: Option<Letter>) -> (usize, bool) {
        if let Some(a) = a {
            let b = self.ig.alphabet().bar(a);
            if let Some(&i) = self.terminals.get(&Some(b)) {
                if b != a {
                    return (i, true);
                }
            }
        }
        if let Some(&i) = self.terminals.get(&a) {
            return (i, false);
        }
        let len = if a.is_some() { L::one() } else { L::zero() };
        self.work.push((WorkRule::Terminal(a), len, 1, None));
        let i = self.work.len() - 1;
        self.terminals.insert(a, i);
        (i, false)
    }

    /// The symbol `base[lo, hi]` (oriented by `bar`) as a part of a rule,
    /// registering it as pending when it is new.
    fn demand(&mut self, base: Base, bar: bool, lo: L, hi: L) -> Part<L> {
        let n = self.base_len(base).clone();
        let (lo, hi) = if bar { (diff(&n, &hi), diff(&n, &lo)) } else { (lo, hi) };
        if let Base::Work(i) = base {
            if lo.is_zero() && hi == n {
                return Part::Ref(i, bar);
            }
        }
        let key = (base, lo, hi);
        if let Some(Resolution::Done(i, b)) = self.resolved.get(&key) {
            return Part::Ref(*i, *b != bar);
        }
        if !self.resolved.contains_key(&key) {
            let entry = (self.base_height(base), self.base_name(base), key.1.clone(), key.2.clone(), base);
            if self.pending.insert(entry) {
                self.weight += self.weight_of(&key);
                self.stats.peak_weight = self.stats.peak_weight.max(self.weight);
            }
        }
        Part::Sym(key, bar)
    }

    fn lookup(&self, part: &Part<L>) -> (usize, bool) {
        let mut cur = part.clone();
        loop {
            match cur {
                Part::Ref(i, b) => return (i, b),
                Part::Sym(key, b) => match self.resolved.get(&key) {
                    Some(Resolution::Done(i, b2)) => return (*i, *b2 != b),
                    Some(Resolution::Alias(k2, b2)) => cur = Part::Sym(k2.clone(), *b2 != b),
                    None => panic!("symbol used before it was resolved"),
                },
            }
        }
    }

    fn work_len(&self, r: (usize, bool)) -> &L {
        &self.work[r.0].1
    }

    /// Children of a base as resolved work references, or its terminal.
    fn children(&mut self, base: Base) -> std::result::Result<((usize, bool), (usize, bool)), Option<Letter>> {
        match base {
            Base::Ig(v) => match self.ig.rule(v).clone() {
                IgRule::Terminal(a) => Err(a),
                IgRule::Slice(s) => {
                    let y = self.lookup_slice(&s);
                    Ok((y, self.terminal(None)))
                }
                IgRule::SlicePair(s, t) => Ok((self.lookup_slice(&s), self.lookup_slice(&t))),
            },
            Base::Work(i) => match self.work[i].0.clone() {
                WorkRule::Terminal(a) => Err(a),
                WorkRule::Pair(p, q) => Ok((self.lookup(&p), self.lookup(&q))),
            },
        }
    }

    fn lookup_slice(&mut self, s: &IgSlice<L>) -> (usize, bool) {
        let part = self.demand(Base::Ig(s.var.var), s.var.bar, s.lo.clone(), s.hi.clone());
        self.lookup(&part)
    }

    fn letter_at(&mut self, mut r: (usize, bool), pos: &L) -> Letter {
        let mut p = pos.clone();
        loop {
            match self.children(Base::Work(r.0)) {
                Err(a) => {
                    let a = a.expect("position inside a non-empty word");
                    return if r.1 { self.ig.alphabet().bar(a) } else { a };
                }
                Ok((y, z)) => {
                    let (y, z) = if r.1 { ((z.0, !z.1), (y.0, !y.1)) } else { (y, z) };
                    let ly = self.work_len(y).clone();
                    if p < ly {
                        r = y;
                    } else {
                        p = diff(&p, &ly);
                        r = z;
                    }
                }
            }
        }
    }

    fn new_work(&mut self, rule: WorkRule<L>, len: L, height: u32) -> usize {
        self.work.push((rule, len, height, None));
        self.work.len() - 1
    }

    /// Eliminates one pending symbol of minimal height.
    fn step(&mut self, key: Key<L>) -> Result<()> {
        let (base, lo, hi) = key.clone();
        let height = self.base_height(base);
        let count = diff(&hi, &lo);
        let resolution = if count <= L::one() {
            let letter = if count.is_zero() {
                None
            } else {
                Some(match self.children(base) {
                    Err(a) => a.expect("slice of length one"),
                    Ok((y, z)) => {
                        let ly = self.work_len(y).clone();
                        if lo < ly {
                            self.letter_at(y, &lo)
                        } else {
                            self.letter_at(z, &diff(&lo, &ly))
                        }
                    }
                })
            };
            let (i, b) = self.terminal(letter);
            Resolution::Done(i, b)
        } else {
            let (y, z) = self.children(base).expect("terminals have length at most one");
            let n1 = self.work_len(y).clone();
            if hi <= n1 {
                match self.demand(Base::Work(y.0), y.1, lo, hi) {
                    Part::Ref(i, b) => Resolution::Done(i, b),
                    Part::Sym(k, b) => Resolution::Alias(k, b),
                }
            } else if lo >= n1 {
                match self.demand(Base::Work(z.0), z.1, diff(&lo, &n1), diff(&hi, &n1)) {
                    Part::Ref(i, b) => Resolution::Done(i, b),
                    Part::Sym(k, b) => Resolution::Alias(k, b),
                }
            } else {
                let left = self.demand(Base::Work(y.0), y.1, lo, n1.clone());
                let right = self.demand(Base::Work(z.0), z.1, L::zero(), diff(&hi, &n1));
                let i = self.new_work(WorkRule::Pair(left, right), count, height);
                Resolution::Done(i, false)
            }
        };
        self.resolved.insert(key, resolution);
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        while let Some(entry) = self.pending.pop_first() {
            let key = (entry.4, entry.2, entry.3);
            let before = self.weight;
            self.weight -= self.weight_of(&key);
            self.step(key)?;
            self.stats.steps += 1;
            if self.weight >= before {
                return Err(Error::InternalInvariantViolation(format!(
                    "weight did not decrease ({before} -> {})",
                    self.weight
                )));
            }
        }
        Ok(())
    }
}

/// Converts an interval grammar into an SLP containing a variable for every
/// input variable and every slice occurring on a right-hand side.
///
/// Pending slices are eliminated lowest height first (ties broken by
/// variable name, then interval); every step strictly lowers the total
/// weight, which bounds the number of new rules by `O(h(S)·|Ω|)`.
pub fn ig_to_slp<L: Length>(ig: &IntervalGrammar<L>) -> Result<Converted<L>> {
    let mut c = Converter {
        ig,
        work: Vec::new(),
        terminals: HashMap::new(),
        pending: BTreeSet::new(),
        resolved: HashMap::new(),
        weight: 0,
        stats: ConversionStats::default(),
    };
    let mut wanted: Vec<Key<L>> = Vec::new();
    for v in ig.vars() {
        for s in ig.rule(v).slices() {
            let n = ig.len(s.var);
            let (lo, hi) = if s.var.bar { (diff(n, &s.hi), diff(n, &s.lo)) } else { (s.lo.clone(), s.hi.clone()) };
            wanted.push((Base::Ig(s.var.var), lo, hi));
        }
    }
    for v in ig.vars() {
        wanted.push((Base::Ig(v), L::zero(), ig.len(v.pos()).clone()));
    }
    for k in &wanted {
        c.demand(k.0, false, k.1.clone(), k.2.clone());
    }
    c.stats.initial_weight = c.weight;
    c.run()?;

    // name the results after the input, then materialize what is reachable
    let mut results: Vec<(Key<L>, (usize, bool))> = Vec::new();
    for k in &wanted {
        let r = c.lookup(&Part::Sym(k.clone(), false));
        results.push((k.clone(), r));
    }
    for (k, r) in results.iter().rev() {
        let Base::Ig(v) = k.0 else { unreachable!() };
        let full = k.1.is_zero() && &k.2 == ig.len(v.pos());
        if !r.1 && c.work[r.0].3.is_none() && c.work[r.0].1 > L::zero() {
            c.work[r.0].3 = Some(if full { ig.name(v).to_string() } else { format!("{}_{}_{}", ig.name(v), k.1, k.2) });
        }
    }
    let mut slp = Slp::new(ig.alphabet().clone());
    let mut out: Vec<Option<Var>> = vec![None; c.work.len()];
    for (_, r) in &results {
        let mut stack = vec![(r.0, false)];
        while let Some((i, expanded)) = stack.pop() {
            if out[i].is_some() {
                continue;
            }
            match c.work[i].0.clone() {
                WorkRule::Terminal(a) => out[i] = Some(slp.push_terminal(c.work[i].3.as_deref(), a)),
                WorkRule::Pair(p, q) => {
                    let (p, q) = (c.lookup(&p), c.lookup(&q));
                    if expanded {
                        let y = VarRef { var: out[p.0].unwrap(), bar: p.1 };
                        let z = VarRef { var: out[q.0].unwrap(), bar: q.1 };
                        out[i] = Some(slp.push_pair(c.work[i].3.as_deref(), y, z)?);
                    } else {
                        stack.push((i, true));
                        stack.push((q.0, false));
                        stack.push((p.0, false));
                    }
                }
            }
        }
    }
    let image = |r: (usize, bool)| VarRef { var: out[r.0].unwrap(), bar: r.1 };
    let nvars = ig.num_vars();
    let mut vars = Vec::with_capacity(nvars);
    let mut slices = BTreeMap::new();
    for (i, (k, r)) in results.iter().enumerate() {
        let Base::Ig(v) = k.0 else { unreachable!() };
        if i + nvars >= results.len() {
            vars.push(image(*r));
        } else {
            slices.insert((v, k.1.clone(), k.2.clone()), image(*r));
        }
    }
    let mut stats = c.stats;
    stats.rules = slp.num_vars();
    stats.height_times_vars = ig.max_height() as u128 * nvars as u128;
    stats.vars_squared = (nvars as u128) * (nvars as u128);
    Ok(Converted { slp, vars, slices, stats })
}
