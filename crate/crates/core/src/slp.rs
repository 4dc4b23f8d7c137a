//! Straight-line programs over an alphabet with involution.
//!
//! Every positive variable has exactly one rule, `X → a` (with `a` a letter
//! or the empty word) or `X → Y Z` with `Y, Z ∈ Ω`. Barred variables are not
//! stored: `eval(X̄)` is the inverse of `eval(X)`, and `X̄ → Z̄ Ȳ` whenever
//! `X → Y Z`.
//!
//! A validated [`Slp`] keeps its variables in a topological order (children
//! before parents), together with lengths and heights. Builders that append
//! variables only ever reference existing ones, so this order is preserved.

use std::collections::HashMap;

use crate::alphabet::{is_variable_name, Alphabet, Letter, Named, Var, VarRef, Word};
use crate::error::{Error, Result};
use crate::num::{diff, Length};

/// Default bound on the number of letters materialized by evaluation.
pub const DEFAULT_CAP: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Terminal(Option<Letter>),
    Pair(VarRef, VarRef),
}

/// A reference to a variable by name, possibly barred (`~X`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NameRef {
    pub name: String,
    pub bar: bool,
}

impl NameRef {
    pub fn plain(name: impl Into<String>) -> Self {
        NameRef { name: name.into(), bar: false }
    }

    pub fn barred(name: impl Into<String>) -> Self {
        NameRef { name: name.into(), bar: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawRule {
    Terminal(Option<String>),
    Pair(NameRef, NameRef),
}

/// An unvalidated rule set, in input order.
#[derive(Debug, Clone, Default)]
pub struct SlpBuilder {
    pub alphabet: Alphabet,
    pub rules: Vec<(String, RawRule)>,
}

impl SlpBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        SlpBuilder { alphabet, rules: Vec::new() }
    }

    pub fn terminal(&mut self, x: &str, letter: &str) -> &mut Self {
        self.rules.push((x.to_string(), RawRule::Terminal(Some(letter.to_string()))));
        self
    }

    pub fn empty(&mut self, x: &str) -> &mut Self {
        self.rules.push((x.to_string(), RawRule::Terminal(None)));
        self
    }

    /// `X → Y Z`; a leading `~` bars a child.
    pub fn pair(&mut self, x: &str, y: &str, z: &str) -> &mut Self {
        let r = |s: &str| match s.strip_prefix('~') {
            Some(n) => NameRef::barred(n),
            None => NameRef::plain(s),
        };
        self.rules.push((x.to_string(), RawRule::Pair(r(y), r(z))));
        self
    }

    pub fn build<L: Length>(&self) -> Result<Slp<L>> {
        Slp::validate(self)
    }
}

/// Orders `names` so that every variable follows the variables its rule uses.
///
/// `deps(i)` lists the indices used by rule `i`. The traversal starts from the
/// names in sorted order, so the result does not depend on input order.
pub(crate) fn topological_order(names: &[String], deps: &[Vec<usize>]) -> Result<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut roots: Vec<usize> = (0..names.len()).collect();
    roots.sort_by(|&a, &b| names[a].cmp(&names[b]));
    let mut mark = vec![Mark::New; names.len()];
    let mut order = Vec::with_capacity(names.len());
    for root in roots {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Open;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&child) = deps[node].get(*next) {
                *next += 1;
                match mark[child] {
                    Mark::New => {
                        mark[child] = Mark::Open;
                        stack.push((child, 0));
                    }
                    Mark::Open => return Err(Error::CyclicDependency(names[child].clone())),
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                order.push(node);
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// A validated straight-line program with lengths of type `L`.
#[derive(Debug, Clone)]
pub struct Slp<L> {
    alphabet: Alphabet,
    names: Vec<String>,
    by_name: HashMap<String, Var>,
    rules: Vec<Rule>,
    lengths: Vec<L>,
    heights: Vec<u32>,
    fresh: usize,
    /// First variable with each terminal rule.
    terminals: HashMap<Option<Letter>, Var>,
}

impl<L: Length> Slp<L> {
    pub fn new(alphabet: Alphabet) -> Self {
        Slp {
            alphabet,
            names: Vec::new(),
            by_name: HashMap::new(),
            rules: Vec::new(),
            lengths: Vec::new(),
            heights: Vec::new(),
            fresh: 0,
            terminals: HashMap::new(),
        }
    }

    /// Checks a raw rule set and computes lengths and heights.
    pub fn validate(raw: &SlpBuilder) -> Result<Self> {
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
        let lookup = |r: &NameRef| -> Result<usize> {
            index.get(r.name.as_str()).copied().ok_or_else(|| {
                if is_variable_name(&r.name) {
                    Error::MissingRule(r.name.clone())
                } else {
                    Error::UnknownSymbol(r.name.clone())
                }
            })
        };
        let mut deps = Vec::with_capacity(raw.rules.len());
        for (_, rule) in &raw.rules {
            deps.push(match rule {
                RawRule::Terminal(Some(a)) => {
                    if raw.alphabet.letter(a).is_none() {
                        return Err(Error::UnknownSymbol(a.clone()));
                    }
                    vec![]
                }
                RawRule::Terminal(None) => vec![],
                RawRule::Pair(y, z) => vec![lookup(y)?, lookup(z)?],
            });
        }
        let order = topological_order(&names, &deps)?;
        let mut slp = Slp::new(raw.alphabet.clone());
        let mut new_index = vec![Var(0); names.len()];
        for old in order {
            let (name, rule) = &raw.rules[old];
            let rule = match rule {
                RawRule::Terminal(a) => Rule::Terminal(a.as_ref().map(|a| raw.alphabet.letter(a).unwrap())),
                RawRule::Pair(y, z) => {
                    let r = |n: &NameRef| VarRef { var: new_index[index[n.name.as_str()]], bar: n.bar };
                    Rule::Pair(r(y), r(z))
                }
            };
            new_index[old] = slp.push_rule(Some(name.clone()), rule)?;
        }
        Ok(slp)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of positive variables `|Ω₊|`.
    pub fn num_vars(&self) -> usize {
        self.rules.len()
    }

    /// Total size `‖S‖`: the number of symbols on right-hand sides.
    pub fn size(&self) -> usize {
        self.rules
            .iter()
            .map(|r| match r {
                Rule::Terminal(_) => 1,
                Rule::Pair(..) => 2,
            })
            .sum()
    }

    pub fn vars(&self) -> impl DoubleEndedIterator<Item = Var> + ExactSizeIterator + '_ {
        (0..self.rules.len() as u32).map(Var)
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.by_name.get(name).copied()
    }

    /// Resolves `X` or `~X`.
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

    pub fn rule(&self, x: Var) -> Rule {
        self.rules[x.index()]
    }

    pub fn len(&self, x: VarRef) -> &L {
        &self.lengths[x.var.index()]
    }

    pub fn height(&self, x: VarRef) -> u32 {
        self.heights[x.var.index()]
    }

    /// Maximal height over all variables (0 for an empty program).
    pub fn max_height(&self) -> u32 {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    /// The two children of `x`, oriented: `X̄ → Z̄ Ȳ`.
    pub fn children(&self, x: VarRef) -> Option<(VarRef, VarRef)> {
        match self.rules[x.var.index()] {
            Rule::Pair(y, z) if x.bar => Some((z.inverse(), y.inverse())),
            Rule::Pair(y, z) => Some((y, z)),
            Rule::Terminal(_) => None,
        }
    }

    /// The letter produced by a terminal rule, oriented.
    pub fn terminal(&self, x: VarRef) -> Option<Option<Letter>> {
        match self.rules[x.var.index()] {
            Rule::Terminal(a) => Some(a.map(|a| if x.bar { self.alphabet.bar(a) } else { a })),
            Rule::Pair(..) => None,
        }
    }

    fn fresh_name(&mut self, hint: &str) -> String {
        loop {
            let name = format!("{hint}{}", self.fresh);
            self.fresh += 1;
            if !self.by_name.contains_key(&name) {
                return name;
            }
        }
    }

    fn push_rule(&mut self, name: Option<String>, rule: Rule) -> Result<Var> {
        let name = match name {
            Some(n) if !self.by_name.contains_key(&n) => n,
            Some(n) => {
                let hint = format!("{n}_");
                self.fresh_name(&hint)
            }
            None => self.fresh_name("N"),
        };
        let (len, height) = match rule {
            Rule::Terminal(a) => (if a.is_some() { L::one() } else { L::zero() }, 1),
            Rule::Pair(y, z) => {
                let n = self.rules.len();
                if y.var.index() >= n || z.var.index() >= n {
                    return Err(Error::UnknownVariable(format!("child of {name}")));
                }
                let len = self.len(y).checked_add(self.len(z)).ok_or(Error::LengthOverflow)?;
                (len, 1 + self.height(y).max(self.height(z)))
            }
        };
        let var = Var(self.rules.len() as u32);
        if let Rule::Terminal(a) = rule {
            self.terminals.entry(a).or_insert(var);
        }
        self.by_name.insert(name.clone(), var);
        self.names.push(name);
        self.rules.push(rule);
        self.lengths.push(len);
        self.heights.push(height);
        Ok(var)
    }

    /// Appends `X → a` (or `X → ε` for `None`).
    pub fn push_terminal(&mut self, name: Option<&str>, letter: Option<Letter>) -> Var {
        self.push_rule(name.map(str::to_string), Rule::Terminal(letter))
            .expect("terminal rules cannot fail")
    }

    /// Appends `X → Y Z`.
    pub fn push_pair(&mut self, name: Option<&str>, y: VarRef, z: VarRef) -> Result<Var> {
        self.push_rule(name.map(str::to_string), Rule::Pair(y, z))
    }

    /// Concatenation that skips empty operands instead of adding a rule.
    pub fn concat(&mut self, y: VarRef, z: VarRef) -> Result<VarRef> {
        if self.len(y).is_zero() {
            Ok(z)
        } else if self.len(z).is_zero() {
            Ok(y)
        } else {
            Ok(self.push_pair(None, y, z)?.pos())
        }
    }

    /// Left-nested concatenation of a list; `None` for the empty list.
    pub fn concat_all(&mut self, parts: &[VarRef]) -> Result<Option<VarRef>> {
        let mut acc: Option<VarRef> = None;
        for &p in parts {
            acc = Some(match acc {
                None => p,
                Some(a) => self.concat(a, p)?,
            });
        }
        Ok(acc)
    }

    /// A variable producing the empty word (shared).
    pub fn empty_var(&mut self) -> VarRef {
        if let Some(v) = self.terminals.get(&None) {
            return v.pos();
        }
        self.push_terminal(None, None).pos()
    }

    /// A variable producing the single letter `a` (shared).
    pub fn letter_var(&mut self, a: Letter) -> VarRef {
        let b = self.alphabet.bar(a);
        match (self.terminals.get(&Some(a)), self.terminals.get(&Some(b))) {
            (Some(v), Some(w)) => if v <= w { v.pos() } else { w.neg() },
            (Some(v), None) => v.pos(),
            (None, Some(w)) => w.neg(),
            (None, None) => self.push_terminal(None, Some(a)).pos(),
        }
    }

    /// Balanced program for an explicit word.
    pub fn push_word(&mut self, w: &Word) -> Result<VarRef> {
        if w.is_empty() {
            return Ok(self.empty_var());
        }
        let mut level: Vec<VarRef> = w.letters().iter().map(|&a| self.letter_var(a)).collect();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for chunk in level.chunks(2) {
                next.push(match chunk {
                    [y, z] => self.push_pair(None, *y, *z)?.pos(),
                    [y] => *y,
                    _ => unreachable!(),
                });
            }
            level = next;
        }
        Ok(level[0])
    }

    /// `eval(x)^e` by repeated squaring, with `O(log e)` new rules.
    pub fn push_power(&mut self, x: VarRef, e: &L) -> Result<VarRef> {
        if e.is_zero() || self.len(x).is_zero() {
            return Ok(self.empty_var());
        }
        let two = L::one() + L::one();
        let mut bits = Vec::new();
        let mut n = e.clone();
        while !n.is_zero() {
            bits.push(n.is_odd());
            n = n / two.clone();
        }
        let mut acc = x;
        for &bit in bits.iter().rev().skip(1) {
            acc = self.push_pair(None, acc, acc)?.pos();
            if bit {
                acc = self.push_pair(None, acc, x)?.pos();
            }
        }
        Ok(acc)
    }

    /// Copies every rule of `other` (over the same alphabet) into `self`,
    /// returning the image of each variable of `other`.
    pub fn absorb(&mut self, other: &Slp<L>) -> Result<Vec<VarRef>> {
        let mut map: Vec<VarRef> = Vec::with_capacity(other.num_vars());
        for v in other.vars() {
            let name = other.name(v);
            let r = match other.rule(v) {
                Rule::Terminal(a) => self.push_terminal(Some(name), a).pos(),
                Rule::Pair(y, z) => {
                    let y2 = map[y.var.index()].flipped(y.bar);
                    let z2 = map[z.var.index()].flipped(z.bar);
                    self.push_pair(Some(name), y2, z2)?.pos()
                }
            };
            map.push(r);
        }
        Ok(map)
    }

    /// `eval(x)`, refusing to materialize more than `cap` letters.
    pub fn eval(&self, x: VarRef, cap: usize) -> Result<Word> {
        let len = self.len(x);
        if len.as_count().is_none_or(|n| n > cap) {
            return Err(Error::CapExceeded { len: len.to_string(), cap });
        }
        let mut out = Vec::with_capacity(len.as_count().unwrap());
        let mut stack = vec![x];
        while let Some(v) = stack.pop() {
            match self.children(v) {
                Some((y, z)) => {
                    stack.push(z);
                    stack.push(y);
                }
                None => out.extend(self.terminal(v).unwrap()),
            }
        }
        Ok(Word(out))
    }

    /// The letter at position `pos` (0-based) of `eval(x)`.
    pub fn letter_at(&self, x: VarRef, pos: &L) -> Result<Letter> {
        if pos >= self.len(x) {
            return Err(Error::OutOfRange(format!("position {pos} in {}", self.display(x))));
        }
        let mut v = x;
        let mut p = pos.clone();
        loop {
            match self.children(v) {
                Some((y, z)) => {
                    let ly = self.len(y);
                    if &p < ly {
                        v = y;
                    } else {
                        p = diff(&p, ly);
                        v = z;
                    }
                }
                None => return Ok(self.terminal(v).unwrap().expect("non-empty terminal")),
            }
        }
    }

    /// `eval(x)[α, β]` without materializing `eval(x)`.
    pub fn extract(&self, x: VarRef, from: &L, to: &L, cap: usize) -> Result<Word> {
        if from > to || to > self.len(x) {
            return Err(Error::OutOfRange(format!(
                "[{from},{to}] in {} of length {}",
                self.display(x),
                self.len(x)
            )));
        }
        let n = diff(to, from);
        if n.as_count().is_none_or(|n| n > cap) {
            return Err(Error::CapExceeded { len: n.to_string(), cap });
        }
        let mut out = Vec::with_capacity(n.as_count().unwrap());
        // (variable, start, end) relative to the variable
        let mut stack = vec![(x, from.clone(), to.clone())];
        while let Some((v, a, b)) = stack.pop() {
            if a == b {
                continue;
            }
            match self.children(v) {
                None => out.extend(self.terminal(v).unwrap()),
                Some((y, z)) => {
                    let ly = self.len(y).clone();
                    if b > ly {
                        let za = if a > ly { diff(&a, &ly) } else { L::zero() };
                        stack.push((z, za, diff(&b, &ly)));
                    }
                    if a < ly {
                        let yb = if b < ly { b } else { ly.clone() };
                        stack.push((y, a, yb));
                    }
                }
            }
        }
        Ok(Word(out))
    }

    /// A variable evaluating to the prefix of length `k` of `eval(x)`.
    /// Adds at most `h(x)` rules; the result has height at most `h(x)`.
    pub fn prefix(&mut self, x: VarRef, k: &L) -> Result<VarRef> {
        if k > self.len(x) {
            return Err(Error::OutOfRange(format!("prefix {k} of {}", self.display(x))));
        }
        if k == self.len(x) {
            return Ok(x);
        }
        if k.is_zero() {
            return Ok(self.empty_var());
        }
        let (y, z) = self.children(x).expect("0 < k < |x| needs a pair rule");
        let ly = self.len(y).clone();
        if *k <= ly {
            self.prefix(y, k)
        } else {
            let rest = self.prefix(z, &diff(k, &ly))?;
            Ok(self.push_pair(None, y, rest)?.pos())
        }
    }

    /// A variable evaluating to the suffix of length `k` of `eval(x)`.
    pub fn suffix(&mut self, x: VarRef, k: &L) -> Result<VarRef> {
        Ok(self.prefix(x.inverse(), k)?.inverse())
    }

    /// A variable evaluating to `eval(x)[α, β]`.
    pub fn slice(&mut self, x: VarRef, from: &L, to: &L) -> Result<VarRef> {
        if from > to || to > self.len(x) {
            return Err(Error::OutOfRange(format!("[{from},{to}] in {}", self.display(x))));
        }
        let mut v = x;
        let (mut a, mut b) = (from.clone(), to.clone());
        loop {
            if a.is_zero() {
                return self.prefix(v, &b);
            }
            if &b == self.len(v) {
                let k = diff(&b, &a);
                return self.suffix(v, &k);
            }
            let (y, z) = self.children(v).expect("proper slice needs a pair rule");
            let ly = self.len(y).clone();
            if b <= ly {
                v = y;
            } else if a >= ly {
                a = diff(&a, &ly);
                b = diff(&b, &ly);
                v = z;
            } else {
                let left = self.suffix(y, &diff(&ly, &a))?;
                let right = self.prefix(z, &diff(&b, &ly))?;
                return Ok(self.push_pair(None, left, right)?.pos());
            }
        }
    }

    /// Renames variable `x`; fails if the name is taken or invalid.
    pub fn rename(&mut self, x: Var, name: &str) -> Result<()> {
        if !is_variable_name(name) || self.by_name.contains_key(name) {
            return Err(Error::UnknownSymbol(format!("cannot rename to {name:?}")));
        }
        let old = std::mem::replace(&mut self.names[x.index()], name.to_string());
        self.by_name.remove(&old);
        self.by_name.insert(name.to_string(), x);
        Ok(())
    }

    /// The sub-program reachable from `roots`, with the images of the roots.
    pub fn prune(&self, roots: &[VarRef]) -> (Slp<L>, Vec<VarRef>) {
        let mut live = vec![false; self.num_vars()];
        for r in roots {
            live[r.var.index()] = true;
        }
        for v in self.vars().rev() {
            if live[v.index()] {
                if let Rule::Pair(y, z) = self.rule(v) {
                    live[y.var.index()] = true;
                    live[z.var.index()] = true;
                }
            }
        }
        let mut out = Slp::new(self.alphabet.clone());
        let mut map = vec![None; self.num_vars()];
        for v in self.vars().filter(|v| live[v.index()]) {
            let rule = match self.rule(v) {
                Rule::Terminal(a) => Rule::Terminal(a),
                Rule::Pair(y, z) => {
                    let f = |r: VarRef| VarRef { var: map[r.var.index()].unwrap(), bar: r.bar };
                    Rule::Pair(f(y), f(z))
                }
            };
            map[v.index()] = Some(out.push_rule(Some(self.name(v).to_string()), rule).unwrap());
        }
        let images = roots
            .iter()
            .map(|r| VarRef { var: map[r.var.index()].unwrap(), bar: r.bar })
            .collect();
        (out, images)
    }

    /// For every variable and pattern, whether the pattern is a factor of
    /// `eval(X)`. Indexed `[var][pattern]` over positive variables;
    /// `w` is a factor of `eval(X̄)` iff `w̄` is a factor of `eval(X)`.
    pub fn factor_occurs(&self, patterns: &[Word]) -> Vec<Vec<bool>> {
        let al = &self.alphabet;
        // patterns followed by their inverses, so barred children can be read off
        let mut all: Vec<Word> = patterns.to_vec();
        all.extend(patterns.iter().map(|w| w.inverse(al)));
        let np = patterns.len();
        let dual = |i: usize| if i < np { i + np } else { i - np };
        let k = patterns.iter().map(Word::len).max().unwrap_or(0);

        struct Info {
            prefix: Vec<Letter>,
            suffix: Vec<Letter>,
            found: Vec<bool>,
        }
        let oriented = |info: &Info, bar: bool| -> (Vec<Letter>, Vec<Letter>, Vec<bool>) {
            if !bar {
                (info.prefix.clone(), info.suffix.clone(), info.found.clone())
            } else {
                let inv = |s: &[Letter]| s.iter().rev().map(|&a| al.bar(a)).collect::<Vec<_>>();
                (inv(&info.suffix), inv(&info.prefix), (0..all.len()).map(|i| info.found[dual(i)]).collect())
            }
        };
        let mut infos: Vec<Info> = Vec::with_capacity(self.num_vars());
        for v in self.vars() {
            let info = match self.rule(v) {
                Rule::Terminal(a) => {
                    let word: Vec<Letter> = a.into_iter().collect();
                    let found = all.iter().map(|p| Word(word.clone()).contains_factor(p)).collect();
                    Info { prefix: word.clone(), suffix: word, found }
                }
                Rule::Pair(y, z) => {
                    let (yp, ys, yf) = oriented(&infos[y.var.index()], y.bar);
                    let (zp, zs, zf) = oriented(&infos[z.var.index()], z.bar);
                    let mut junction = ys.clone();
                    junction.extend_from_slice(&zp);
                    let found = (0..all.len())
                        .map(|i| {
                            yf[i]
                                || zf[i]
                                || (!all[i].is_empty() && junction.windows(all[i].len()).any(|w| w == all[i].0.as_slice()))
                        })
                        .collect();
                    let mut prefix = yp.clone();
                    if prefix.len() < k {
                        prefix.extend(zp.iter().take(k - prefix.len()));
                    }
                    let mut suffix = zs.clone();
                    if suffix.len() < k {
                        let need = k - suffix.len();
                        let start = ys.len().saturating_sub(need);
                        let mut s = ys[start..].to_vec();
                        s.extend_from_slice(&suffix);
                        suffix = s;
                    }
                    Info { prefix, suffix, found }
                }
            };
            infos.push(info);
        }
        infos.into_iter().map(|i| i.found[..np].to_vec()).collect()
    }
}

/// `A_0 → A_1 A_1, …, A_{n-1} → A_n A_n, A_n → a`: evaluates to `a^{2^n}`.
pub fn doubling<L: Length>(n: usize, letter: &str) -> Slp<L> {
    let mut al = Alphabet::new();
    al.add_pair(letter, &format!("{letter}\u{304}")).unwrap();
    let mut b = SlpBuilder::new(al);
    for i in 0..n {
        let c = format!("A{}", i + 1);
        b.pair(&format!("A{i}"), &c, &c);
    }
    b.terminal(&format!("A{n}"), letter);
    b.build().expect("doubling grammar is valid")
}

/// Fibonacci grammar `F_1 → b, F_2 → a, F_n → F_{n-1} F_{n-2}`.
pub fn fibonacci<L: Length>(n: usize) -> Slp<L> {
    let mut al = Alphabet::new();
    al.add_pair("a", "ā").unwrap();
    al.add_pair("b", "b̄").unwrap();
    let mut b = SlpBuilder::new(al);
    b.terminal("F1", "b").terminal("F2", "a");
    for i in 3..=n {
        b.pair(&format!("F{i}"), &format!("F{}", i - 1), &format!("F{}", i - 2));
    }
    b.build().expect("fibonacci grammar is valid")
}
