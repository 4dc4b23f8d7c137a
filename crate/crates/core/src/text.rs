//! Line-oriented text formats.
//!
//! Every format ignores blank lines and everything after `#`. Grammars start
//! with an alphabet line such as `alphabet a/ā b/b̄ t`, where a lone letter
//! is its own inverse. Variables match `[A-Z][A-Za-z0-9_]*` and `~X` is the
//! barred variable.
//!
//! * SLP: `X -> Y ~Z`, `X -> 'a'`, `X -> ''`, plus optional `bind X = ~Y`
//!   lines naming the values of system variables.
//! * Interval grammar: the SLP rules plus slices `X -> Y[3,7] ~Z[0,2]`.
//! * Questions: `X[i,j] = Y[k,l]`.
//! * Endomorphisms: an alphabet line, then `alpha: a -> a b ; b -> b`.
//! * Word equations: an alphabet line, `eq: X Y ~X = Z`, `const: A = "a"`.
//! * Solutions: `X = "b c b"`.
//! * Free products: `factor x: Z^1`, `factor y: Z/6 + Z^2` (optionally
//!   followed by `gens a b` naming the generators), `eq: ...`, `neq: X = Y`
//!   and the constraints `parikh: X counts{x:2,y:1} ab{x:(3),y:(1,0,0)} first x
//!   last y`, `alph: X {x,y} first x last y`, `neq1: X`. Abelian tuples list
//!   the free coordinates first, then the torsion coordinates in the order
//!   they were declared.

use std::collections::HashMap;

use crate::alphabet::{Alphabet, Var, VarRef};
use crate::equations::{EquationSystem, Solution};
use crate::error::{Error, Result};
use crate::freegroup::EndomorphismTable;
use crate::ig::{raw_slice, IgBuilder, IgRule, IgSlice, IntervalGrammar, RawIgRule, RawSlice};
use crate::num::Length;
use crate::product::{ExtendedParikhImage, ParikhConstraint, ProductSpec, ProductSystem};
use crate::query::Question;
use crate::slp::{NameRef, RawRule, Rule, Slp, SlpBuilder};

/// Non-empty lines with comments removed, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn name_ref(s: &str) -> NameRef {
    match s.strip_prefix('~') {
        Some(n) => NameRef::barred(n),
        None => NameRef::plain(s),
    }
}

fn parse_len<L: Length>(line: usize, s: &str) -> Result<L> {
    L::from_str_radix(s.trim(), 10).map_err(|_| Error::parse(line, format!("expected a number, found {s:?}")))
}

/// Parses `alphabet a/ā b t`.
pub fn parse_alphabet(line: usize, text: &str) -> Result<Alphabet> {
    let rest = text
        .strip_prefix("alphabet")
        .ok_or_else(|| Error::parse(line, "expected an alphabet line"))?;
    let mut al = Alphabet::new();
    for tok in rest.split_whitespace() {
        let r = match tok.split_once('/') {
            Some((a, b)) => al.add_pair(a, b),
            None => al.add_self_inverse(tok),
        };
        r.map_err(|e| Error::parse(line, e.to_string()))?;
    }
    Ok(al)
}

/// Where names were defined and used, to attach lines to validation errors.
#[derive(Default)]
struct Positions {
    defs: HashMap<String, usize>,
    uses: HashMap<String, usize>,
}

impl Positions {
    fn def(&mut self, name: &str, line: usize) {
        self.defs.insert(name.to_string(), line);
    }

    fn use_(&mut self, name: &str, line: usize) {
        self.uses.entry(name.to_string()).or_insert(line);
    }

    fn locate(&self, e: Error) -> Error {
        let line = match &e {
            Error::DuplicateLhs(n) | Error::CyclicDependency(n) => self.defs.get(n),
            Error::MissingRule(n) | Error::UnknownSymbol(n) => self.uses.get(n).or_else(|| self.defs.get(n)),
            _ => None,
        };
        match line {
            Some(&l) => Error::parse(l, e.to_string()),
            None => e,
        }
    }
}

/// Splits `X -> rhs`.
fn split_rule(line: usize, text: &str) -> Result<(&str, &str)> {
    let (x, rhs) = text
        .split_once("->")
        .ok_or_else(|| Error::parse(line, format!("expected a rule `X -> ...`, found {text:?}")))?;
    Ok((x.trim(), rhs.trim()))
}

/// `'a'` or `''`; `None` if `rhs` is not quoted.
fn quoted_letter(line: usize, rhs: &str) -> Result<Option<Option<String>>> {
    if !rhs.starts_with('\'') {
        return Ok(None);
    }
    let inner = rhs
        .strip_prefix('\'')
        .and_then(|r| r.strip_suffix('\''))
        .filter(|_| rhs.len() >= 2)
        .ok_or_else(|| Error::parse(line, format!("unterminated letter {rhs:?}")))?;
    Ok(Some((!inner.is_empty()).then(|| inner.to_string())))
}

/// An alphabet line followed by lines handed to `body`.
fn with_alphabet(text: &str) -> Result<(Alphabet, Vec<(usize, &str)>)> {
    let mut it = lines(text);
    let (l, first) = it.next().ok_or(Error::EmptyInput)?;
    let al = parse_alphabet(l, first)?;
    Ok((al, it.collect()))
}

/// An SLP together with its `bind X = Y` lines.
pub fn parse_bound_slp<L: Length>(text: &str) -> Result<(Slp<L>, Vec<(String, VarRef)>)> {
    let (al, body) = with_alphabet(text)?;
    let mut b = SlpBuilder::new(al);
    let mut pos = Positions::default();
    let mut binds = Vec::new();
    for (l, t) in body {
        if let Some(rest) = t.strip_prefix("bind ") {
            let (x, y) = rest.split_once('=').ok_or_else(|| Error::parse(l, "expected `bind X = Y`"))?;
            pos.use_(name_ref(y.trim()).name.as_str(), l);
            binds.push((l, x.trim().to_string(), name_ref(y.trim())));
            continue;
        }
        let (x, rhs) = split_rule(l, t)?;
        pos.def(x, l);
        let rule = match quoted_letter(l, rhs)? {
            Some(a) => {
                if let Some(a) = &a {
                    pos.use_(a, l);
                }
                RawRule::Terminal(a)
            }
            None => match rhs.split_whitespace().collect::<Vec<_>>()[..] {
                [y, z] => {
                    let (y, z) = (name_ref(y), name_ref(z));
                    pos.use_(&y.name, l);
                    pos.use_(&z.name, l);
                    RawRule::Pair(y, z)
                }
                _ => return Err(Error::parse(l, format!("expected two variables or a quoted letter, found {rhs:?}"))),
            },
        };
        b.rules.push((x.to_string(), rule));
    }
    let slp: Slp<L> = b.build().map_err(|e| pos.locate(e))?;
    let mut out = Vec::with_capacity(binds.len());
    for (l, x, y) in binds {
        let v = slp.var(&y.name).ok_or_else(|| Error::parse(l, format!("unknown variable {}", y.name)))?;
        out.push((x, VarRef { var: v, bar: y.bar }));
    }
    Ok((slp, out))
}

pub fn parse_slp<L: Length>(text: &str) -> Result<Slp<L>> {
    Ok(parse_bound_slp(text)?.0)
}

/// The SLP in the text format, children before parents.
pub fn format_slp<L: Length>(slp: &Slp<L>) -> String {
    let al = slp.alphabet();
    let mut out = al.declaration();
    out.push('\n');
    for x in slp.vars() {
        let rhs = match slp.rule(x) {
            Rule::Terminal(Some(a)) => format!("'{}'", al.name(a)),
            Rule::Terminal(None) => "''".to_string(),
            Rule::Pair(y, z) => format!("{} {}", slp.display(y), slp.display(z)),
        };
        out.push_str(&format!("{} -> {rhs}\n", slp.name(x)));
    }
    out
}

/// [`format_slp`] followed by `bind` lines for the bound system variables.
pub fn format_bound_slp<L: Length>(slp: &Slp<L>, names: &[String], bindings: &[Option<VarRef>]) -> String {
    let mut out = format_slp(slp);
    for (name, b) in names.iter().zip(bindings) {
        if let Some(b) = b {
            out.push_str(&format!("bind {name} = {}\n", slp.display(*b)));
        }
    }
    out
}

/// Values of the system variables: explicit `bind` lines first, then SLP
/// variables of the same name.
pub fn bindings_for<L: Length>(slp: &Slp<L>, names: &[String], binds: &[(String, VarRef)]) -> Vec<Option<VarRef>> {
    names
        .iter()
        .map(|n| {
            binds
                .iter()
                .find(|b| &b.0 == n)
                .map(|b| b.1)
                .or_else(|| slp.var(n).map(Var::pos))
        })
        .collect()
}

/// `Y` or `Y[lo,hi]`, possibly barred.
fn parse_slice<L: Length>(line: usize, tok: &str, pos: &mut Positions) -> Result<RawSlice<L>> {
    let (name, range) = match tok.split_once('[') {
        None => (tok, None),
        Some((n, r)) => {
            let r = r.strip_suffix(']').ok_or_else(|| Error::parse(line, format!("unterminated slice {tok:?}")))?;
            let (a, b) = r.split_once(',').ok_or_else(|| Error::parse(line, format!("expected `[lo,hi]` in {tok:?}")))?;
            (n, Some((parse_len(line, a)?, parse_len(line, b)?)))
        }
    };
    let s = raw_slice(name, range);
    pos.use_(&s.var.name, line);
    Ok(s)
}

pub fn parse_ig<L: Length>(text: &str) -> Result<IntervalGrammar<L>> {
    let (al, body) = with_alphabet(text)?;
    let mut b = IgBuilder::new(al);
    let mut pos = Positions::default();
    for (l, t) in body {
        let (x, rhs) = split_rule(l, t)?;
        pos.def(x, l);
        let rule = match quoted_letter(l, rhs)? {
            Some(a) => {
                if let Some(a) = &a {
                    pos.use_(a, l);
                }
                RawIgRule::Terminal(a)
            }
            None => match rhs.split_whitespace().collect::<Vec<_>>()[..] {
                [y] => RawIgRule::Slice(parse_slice(l, y, &mut pos)?),
                [y, z] => RawIgRule::SlicePair(parse_slice(l, y, &mut pos)?, parse_slice(l, z, &mut pos)?),
                _ => return Err(Error::parse(l, format!("expected one or two slices, found {rhs:?}"))),
            },
        };
        b.rule(x, rule);
    }
    b.build().map_err(|e| pos.locate(e))
}

pub fn format_ig<L: Length>(ig: &IntervalGrammar<L>) -> String {
    let al = ig.alphabet();
    let slice = |s: &IgSlice<L>| format!("{}[{},{}]", ig.display(s.var), s.lo, s.hi);
    let mut out = al.declaration();
    out.push('\n');
    for x in ig.vars() {
        let rhs = match ig.rule(x) {
            IgRule::Terminal(Some(a)) => format!("'{}'", al.name(*a)),
            IgRule::Terminal(None) => "''".to_string(),
            IgRule::Slice(s) => slice(s),
            IgRule::SlicePair(s, t) => format!("{} {}", slice(s), slice(t)),
        };
        out.push_str(&format!("{} -> {rhs}\n", ig.name(x)));
    }
    out
}

/// One `X[i,j] = Y[k,l]` per line, over the variables of `slp`.
pub fn parse_questions<L: Length>(slp: &Slp<L>, text: &str) -> Result<Vec<Question<L>>> {
    let mut out = Vec::new();
    for (l, t) in lines(text) {
        let (a, b) = t.split_once('=').ok_or_else(|| Error::parse(l, "expected `X[i,j] = Y[k,l]`"))?;
        let side = |s: &str| -> Result<(VarRef, L, L)> {
            let mut pos = Positions::default();
            let s: RawSlice<L> = parse_slice(l, s.trim(), &mut pos)?;
            let v = slp.var(&s.var.name).ok_or_else(|| Error::parse(l, format!("unknown variable {}", s.var.name)))?;
            let x = VarRef { var: v, bar: s.var.bar };
            let (lo, hi) = s.range.unwrap_or_else(|| (L::zero(), slp.len(x).clone()));
            Ok((x, lo, hi))
        };
        let (x, i, j) = side(a)?;
        let (y, k, m) = side(b)?;
        out.push(Question::new(x, i, j, y, k, m));
    }
    Ok(out)
}

pub fn parse_endomorphisms(text: &str) -> Result<EndomorphismTable> {
    let (al, body) = with_alphabet(text)?;
    let mut table = EndomorphismTable::new(al);
    for (l, t) in body {
        let (name, maps) = t.split_once(':').ok_or_else(|| Error::parse(l, "expected `name: a -> w ; ...`"))?;
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::parse(l, format!("invalid endomorphism name {name:?}")));
        }
        for m in maps.split(';').filter(|m| !m.trim().is_empty()) {
            let (a, w) = m.split_once("->").ok_or_else(|| Error::parse(l, format!("expected `a -> w`, found {m:?}")))?;
            table.set(name, a.trim(), w.trim()).map_err(|e| Error::parse(l, e.to_string()))?;
        }
        // a name with no listed letters is the identity
        table.maps.entry(name.to_string()).or_default();
    }
    Ok(table)
}

/// `"…"` with the quotes removed.
fn unquote(line: usize, s: &str) -> Result<&str> {
    let s = s.trim();
    s.strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .filter(|_| s.len() >= 2)
        .ok_or_else(|| Error::parse(line, format!("expected a quoted word, found {s:?}")))
}

fn parse_equation_line(line: usize, rest: &str) -> Result<(&str, &str)> {
    let (l, r) = rest.split_once('=').ok_or_else(|| Error::parse(line, "expected `L = R`"))?;
    Ok((l.trim(), r.trim()))
}

/// Handles `eq:` and `const:` lines; `Ok(false)` for other lines.
fn system_line(sys: &mut EquationSystem, l: usize, t: &str) -> Result<bool> {
    let at = |e: Error| Error::parse(l, e.to_string());
    if let Some(rest) = t.strip_prefix("eq:") {
        let (a, b) = parse_equation_line(l, rest)?;
        sys.add_equation(a, b).map_err(at)?;
    } else if let Some(rest) = t.strip_prefix("const:") {
        let (x, w) = parse_equation_line(l, rest)?;
        sys.add_constant(x, unquote(l, w)?).map_err(at)?;
    } else {
        return Ok(false);
    }
    Ok(true)
}

pub fn parse_system(text: &str) -> Result<EquationSystem> {
    let (al, body) = with_alphabet(text)?;
    let mut sys = EquationSystem::new(al);
    for (l, t) in body {
        if !system_line(&mut sys, l, t)? {
            return Err(Error::parse(l, format!("expected `eq:` or `const:`, found {t:?}")));
        }
    }
    Ok(sys)
}

pub fn format_system(sys: &EquationSystem) -> String {
    let side = |s: &[VarRef]| s.iter().map(|&r| sys.display(r)).collect::<Vec<_>>().join(" ");
    let mut out = sys.alphabet.declaration();
    out.push('\n');
    for e in &sys.equations {
        out.push_str(&format!("eq: {} = {}\n", side(&e.lhs), side(&e.rhs)));
    }
    for (x, c) in &sys.constraints {
        if let crate::equations::Constraint::ConstantEq(w) = c {
            out.push_str(&format!("const: {} = \"{}\"\n", sys.name(*x), sys.alphabet.format_word(w)));
        }
    }
    out
}

/// `X = "…"` lines; unknown variables are rejected.
pub fn parse_solution(sys: &EquationSystem, text: &str) -> Result<Solution> {
    let mut sigma = Solution::new(sys);
    for (l, t) in lines(text) {
        let (x, w) = parse_equation_line(l, t)?;
        let v = sys.var(x).ok_or_else(|| Error::parse(l, format!("unknown variable {x}")))?;
        let w = sys.alphabet.parse_word(unquote(l, w)?).map_err(|e| Error::parse(l, e.to_string()))?;
        sigma.set(v, w);
    }
    Ok(sigma)
}

pub fn format_solution(sys: &EquationSystem, sigma: &Solution) -> String {
    let mut out = String::new();
    for (i, w) in sigma.words.iter().enumerate() {
        if let Some(w) = w {
            out.push_str(&format!("{} = \"{}\"\n", sys.variables[i], sys.alphabet.format_word(w)));
        }
    }
    out
}

/// `Z^2 + Z/6 + Z` as (rank, torsion).
fn parse_group(line: usize, text: &str) -> Result<(usize, Vec<u64>)> {
    let (mut rank, mut torsion) = (0, Vec::new());
    for s in text.split('+').map(str::trim) {
        let bad = || Error::parse(line, format!("expected `Z`, `Z^r` or `Z/d`, found {s:?}"));
        let rest = s.strip_prefix('Z').ok_or_else(bad)?;
        if rest.is_empty() {
            rank += 1;
        } else if let Some(r) = rest.strip_prefix('^') {
            rank += r.trim().parse::<usize>().map_err(|_| bad())?;
        } else if let Some(d) = rest.strip_prefix('/') {
            torsion.push(d.trim().parse::<u64>().map_err(|_| bad())?);
        } else {
            return Err(bad());
        }
    }
    Ok((rank, torsion))
}

/// Handles a `factor name: G [gens a b]` line; `Ok(false)` for other lines.
fn factor_line(spec: &mut ProductSpec, l: usize, t: &str) -> Result<bool> {
    let Some(rest) = t.strip_prefix("factor ") else { return Ok(false) };
    let (name, group) = rest.split_once(':').ok_or_else(|| Error::parse(l, "expected `factor name: group`"))?;
    let (group, gens) = match group.split_once("gens") {
        Some((g, n)) => (g, Some(n.split_whitespace().collect::<Vec<_>>())),
        None => (group, None),
    };
    let (rank, torsion) = parse_group(l, group)?;
    spec.add_factor(name.trim(), rank, &torsion, gens.as_deref())
        .map_err(|e| Error::parse(l, e.to_string()))?;
    Ok(true)
}

pub fn parse_product_spec(text: &str) -> Result<ProductSpec> {
    let mut spec = ProductSpec::new();
    for (l, t) in lines(text) {
        if !factor_line(&mut spec, l, t)? {
            return Err(Error::parse(l, format!("expected a `factor` line, found {t:?}")));
        }
    }
    if spec.factors.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(spec)
}

pub fn format_product_spec(spec: &ProductSpec) -> String {
    let mut out = String::new();
    for f in &spec.factors {
        let mut parts = Vec::new();
        if f.rank > 0 {
            parts.push(format!("Z^{}", f.rank));
        }
        parts.extend(f.torsion.iter().map(|d| format!("Z/{d}")));
        let gens: Vec<&str> = f.gens.iter().flatten().map(|&a| spec.alphabet.name(a)).collect();
        out.push_str(&format!("factor {}: {}", f.name, parts.join(" + ")));
        if !gens.is_empty() {
            out.push_str(&format!(" gens {}", gens.join(" ")));
        }
        out.push('\n');
    }
    out
}

fn factor_named(spec: &ProductSpec, line: usize, name: &str) -> Result<usize> {
    spec.factor_index(name.trim())
        .ok_or_else(|| Error::parse(line, format!("unknown factor {name:?}")))
}

/// `name{k:v,…}` with the braces' content returned, and the remaining text.
fn braced<'t>(line: usize, text: &'t str, key: &str) -> Result<(&'t str, &'t str)> {
    let rest = text
        .trim_start()
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('{'))
        .ok_or_else(|| Error::parse(line, format!("expected `{key}{{…}}`")))?;
    let close = rest.find('}').ok_or_else(|| Error::parse(line, format!("unterminated `{key}{{`")))?;
    Ok((&rest[..close], &rest[close + 1..]))
}

/// Trailing `first x last y`, each part optional.
fn first_last(spec: &ProductSpec, line: usize, text: &str) -> Result<(Option<usize>, Option<usize>)> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let (mut first, mut last) = (None, None);
    let mut i = 0;
    while i < toks.len() {
        let slot = match toks[i] {
            "first" => &mut first,
            "last" => &mut last,
            t => return Err(Error::parse(line, format!("unexpected {t:?}"))),
        };
        let name = toks.get(i + 1).ok_or_else(|| Error::parse(line, format!("missing factor after {:?}", toks[i])))?;
        *slot = Some(factor_named(spec, line, name)?);
        i += 2;
    }
    Ok((first, last))
}

/// `counts{x:2} ab{x:(3)} first x last x`; omitted factors are zero.
pub fn parse_parikh(spec: &ProductSpec, line: usize, text: &str) -> Result<ExtendedParikhImage> {
    let mut p = ExtendedParikhImage::empty(spec);
    let (counts, rest) = braced(line, text, "counts")?;
    for kv in counts.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv.split_once(':').ok_or_else(|| Error::parse(line, format!("expected `factor:count`, found {kv:?}")))?;
        let a = factor_named(spec, line, k)?;
        p.counts[a] = v.trim().parse().map_err(|_| Error::parse(line, format!("bad count {v:?}")))?;
    }
    let (ab, rest) = braced(line, rest, "ab")?;
    let mut ab = ab.trim();
    while !ab.is_empty() {
        let (k, r) = ab.split_once(':').ok_or_else(|| Error::parse(line, "expected `factor:(…)`"))?;
        let a = factor_named(spec, line, k)?;
        let r = r.trim_start().strip_prefix('(').ok_or_else(|| Error::parse(line, "expected `(`"))?;
        let close = r.find(')').ok_or_else(|| Error::parse(line, "unterminated `(`"))?;
        let g = r[..close]
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|_| Error::parse(line, format!("bad coordinate {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let f = &spec.factors[a];
        if g.len() != f.dim() {
            return Err(Error::parse(line, format!("factor {} has {} coordinates", f.name, f.dim())));
        }
        p.abelian[a] = f.normalize(g);
        ab = r[close + 1..].trim_start().trim_start_matches(',').trim_start();
    }
    (p.first, p.last) = first_last(spec, line, rest)?;
    Ok(p)
}

pub fn format_parikh(spec: &ProductSpec, p: &ExtendedParikhImage) -> String {
    let names = |a: usize| spec.factors[a].name.as_str();
    let counts: Vec<String> = p.support().iter().map(|&a| format!("{}:{}", names(a), p.counts[a])).collect();
    let ab: Vec<String> = (0..spec.factors.len())
        .filter(|&a| !spec.factors[a].is_identity(&p.abelian[a]))
        .map(|a| {
            let c: Vec<String> = p.abelian[a].iter().map(i64::to_string).collect();
            format!("{}:({})", names(a), c.join(","))
        })
        .collect();
    let mut out = format!("counts{{{}}} ab{{{}}}", counts.join(","), ab.join(","));
    if let Some(a) = p.first {
        out.push_str(&format!(" first {}", names(a)));
    }
    if let Some(a) = p.last {
        out.push_str(&format!(" last {}", names(a)));
    }
    out
}

/// Parses a product system. `factor` lines come first, then `eq:`, `neq:`,
/// `parikh:`, `alph:` and `neq1:` lines.
pub fn parse_product_system(text: &str) -> Result<ProductSystem> {
    let mut spec = ProductSpec::new();
    let mut body = Vec::new();
    for (l, t) in lines(text) {
        if factor_line(&mut spec, l, t)? {
            if !body.is_empty() {
                return Err(Error::parse(l, "factors must be declared before equations"));
            }
        } else {
            body.push((l, t));
        }
    }
    if spec.factors.is_empty() {
        return Err(Error::EmptyInput);
    }
    product_body(spec, body)
}

/// A product system whose factors were declared separately.
pub fn parse_product_system_over(spec: ProductSpec, text: &str) -> Result<ProductSystem> {
    let body: Vec<(usize, &str)> = lines(text).collect();
    if let Some(&(l, _)) = body.iter().find(|(_, t)| t.starts_with("factor ")) {
        return Err(Error::parse(l, "factors belong in the spec file"));
    }
    product_body(spec, body)
}

fn product_body(spec: ProductSpec, body: Vec<(usize, &str)>) -> Result<ProductSystem> {
    let mut sys = ProductSystem::new(spec);
    for (l, t) in body {
        let at = |e: Error| Error::parse(l, e.to_string());
        let (key, rest) = t.split_once(':').ok_or_else(|| Error::parse(l, format!("unexpected line {t:?}")))?;
        match key.trim() {
            "eq" => {
                let (a, b) = parse_equation_line(l, rest)?;
                sys.add_equation(a, b).map_err(at)?;
            }
            "neq" => {
                let (a, b) = parse_equation_line(l, rest)?;
                sys.add_inequality(a, b).map_err(at)?;
            }
            "neq1" => sys.add_constraint(rest.trim(), ParikhConstraint::NotIdentity).map_err(at)?,
            "parikh" => {
                let rest = rest.trim_start();
                let (x, img) = rest.split_once(char::is_whitespace).ok_or_else(|| Error::parse(l, "expected `parikh: X …`"))?;
                let p = parse_parikh(&sys.spec, l, img)?;
                sys.add_constraint(x, ParikhConstraint::Exact(p)).map_err(at)?;
            }
            "alph" => {
                let rest = rest.trim_start();
                let (x, r) = rest.split_once(char::is_whitespace).ok_or_else(|| Error::parse(l, "expected `alph: X {…}`"))?;
                let r = r.trim_start();
                let close = r.find('}').filter(|_| r.starts_with('{')).ok_or_else(|| Error::parse(l, "expected `{…}`"))?;
                let mut alph = r[1..close]
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| factor_named(&sys.spec, l, s))
                    .collect::<Result<Vec<_>>>()?;
                alph.sort_unstable();
                alph.dedup();
                let (first, last) = first_last(&sys.spec, l, &r[close + 1..])?;
                sys.add_constraint(x, ParikhConstraint::Alphabetic { alph, first, last }).map_err(at)?;
            }
            k => return Err(Error::parse(l, format!("unknown line kind {k:?}"))),
        }
    }
    Ok(sys)
}

/// One constraint line, without the newline.
pub fn format_constraint(spec: &ProductSpec, x: &str, c: &ParikhConstraint) -> String {
    match c {
        ParikhConstraint::Exact(p) => format!("parikh: {x} {}", format_parikh(spec, p)),
        ParikhConstraint::Alphabetic { alph, first, last } => {
            let names: Vec<&str> = alph.iter().map(|&a| spec.factors[a].name.as_str()).collect();
            let mut s = format!("alph: {x} {{{}}}", names.join(","));
            if let Some(a) = first {
                s.push_str(&format!(" first {}", spec.factors[*a].name));
            }
            if let Some(a) = last {
                s.push_str(&format!(" last {}", spec.factors[*a].name));
            }
            s
        }
        ParikhConstraint::NotIdentity => format!("neq1: {x}"),
    }
}

/// The system in the text format; inequalities appear as their equations
/// with a `neq1` constraint.
pub fn format_product_system(sys: &ProductSystem) -> String {
    let spec = &sys.spec;
    let eqs = &sys.equations;
    let side = |s: &[VarRef]| s.iter().map(|&r| eqs.display(r)).collect::<Vec<_>>().join(" ");
    let mut out = format_product_spec(spec);
    for e in &eqs.equations {
        out.push_str(&format!("eq: {} = {}\n", side(&e.lhs), side(&e.rhs)));
    }
    for (x, c) in &sys.constraints {
        out.push_str(&format_constraint(spec, eqs.name(*x), c));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Word;
    use crate::query::equal_eval;

    const FIB: &str = "alphabet a/ā b/b̄\n# comment\nF2 -> F1 F0\nF0 -> 'b'\nF1 -> 'a'\nF3 -> F2 F1\nE -> ''\nG -> ~F3 E\n";

    #[test]
    fn slp_round_trip() {
        let slp: Slp<u64> = parse_slp(FIB).unwrap();
        assert_eq!(slp.alphabet().format_word(&slp.eval(slp.var_ref("F3").unwrap(), 100).unwrap()), "a b a");
        let again: Slp<u64> = parse_slp(&format_slp(&slp)).unwrap();
        for x in slp.vars() {
            let y = again.var(slp.name(x)).unwrap();
            assert_eq!(slp.eval(x.pos(), 100).unwrap(), again.eval(y.pos(), 100).unwrap());
        }
    }

    #[test]
    fn slp_errors_carry_lines() {
        let e = parse_slp::<u64>("alphabet a/ā\nX -> Y Y\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_slp::<u64>("alphabet a/ā\nX -> 'a'\nX -> 'a'\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        assert!(matches!(parse_slp::<u64>("alphabet a\nX -> 'z'\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_slp::<u64>("X -> 'a'\n"), Err(Error::Parse { line: 1, .. })));
        assert_eq!(parse_slp::<u64>("  # nothing\n").unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn bindings_resolve_by_line_or_name() {
        let (slp, binds) = parse_bound_slp::<u64>(&format!("{FIB}bind X = ~F2\n")).unwrap();
        let names = vec!["X".to_string(), "F1".to_string(), "Y".to_string()];
        let b = bindings_for(&slp, &names, &binds);
        assert_eq!(b[0], Some(slp.var_ref("~F2").unwrap()));
        assert_eq!(b[1], Some(slp.var_ref("F1").unwrap()));
        assert_eq!(b[2], None);
        let text = format_bound_slp(&slp, &names, &b);
        let (again, binds) = parse_bound_slp::<u64>(&text).unwrap();
        assert_eq!(binds.len(), 2);
        assert!(equal_eval(&again, binds[0].1, again.var_ref("~F2").unwrap()));
    }

    #[test]
    fn ig_round_trip_and_questions() {
        let text = "alphabet a/ā b/b̄\nA -> 'a'\nB -> 'b'\nC -> A B\nD -> C[0,2] ~C[1,2]\nE -> D[1,3]\n";
        let ig: IntervalGrammar<u64> = parse_ig(text).unwrap();
        let e = ig.var_ref("E").unwrap();
        assert_eq!(ig.alphabet().format_word(&ig.eval(e, 100).unwrap()), "b ā");
        let again: IntervalGrammar<u64> = parse_ig(&format_ig(&ig)).unwrap();
        assert_eq!(again.eval(again.var_ref("E").unwrap(), 100).unwrap(), ig.eval(e, 100).unwrap());

        let slp: Slp<u64> = parse_slp(FIB).unwrap();
        let qs = parse_questions(&slp, "F3[0,1] = F3[2,3]\nF2 = F3[0,2]\n").unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!((qs[1].i, qs[1].j), (0, 2));
        assert!(parse_questions(&slp, "F3[0,1] = Q[0,1]").is_err());
    }

    #[test]
    fn systems_and_solutions() {
        let text = "alphabet a/ā b/b̄ c/c̄\neq: A X B ~X ~A = Y ~B Y ~A B ~Y\nconst: A = \"a\"\nconst: B = \"b\"\n";
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.denotational_length(), 11);
        let sigma = parse_solution(&sys, "X = \"bcbc̄b̄b̄abc\"\nY = \"a b c b c̄ b̄\"\nA = \"a\"\nB = \"b\"\n").unwrap();
        assert!(crate::equations::verify_solution(&sys, &sigma).unwrap());
        let again = parse_system(&format_system(&sys)).unwrap();
        assert_eq!(again.equations, sys.equations);
        assert_eq!(parse_solution(&sys, &format_solution(&sys, &sigma)).unwrap(), sigma);
        assert!(matches!(parse_solution(&sys, "Q = \"a\""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_system("alphabet a\nfoo\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn endomorphisms() {
        let t = parse_endomorphisms("alphabet a/ā b/b̄\nphi: a -> a b ; b -> a\nswap: a -> b; b -> a\nid:\n").unwrap();
        let a = t.alphabet.letter("a").unwrap();
        assert_eq!(t.alphabet.format_word(&t.image("phi", a).unwrap()), "a b");
        assert_eq!(t.image("id", a).unwrap(), Word(vec![a]));
        assert!(parse_endomorphisms("alphabet a/ā\nphi: z -> a\n").is_err());
    }

    #[test]
    fn product_systems_round_trip() {
        let text = "factor x: Z^1\nfactor y: Z/6 + Z^2\neq: X Y = Z\nneq: X = Y\n\
                    parikh: X counts{x:2,y:1} ab{x:(3),y:(1,0,-1)} first x last x\n\
                    alph: Y {y,x} first y\nneq1: Z\n";
        let sys = parse_product_system(text).unwrap();
        let y = &sys.spec.factors[1];
        assert_eq!((y.rank, y.torsion.clone()), (2, vec![6]));
        match &sys.constraints[1].1 {
            ParikhConstraint::Exact(p) => {
                assert_eq!(p.counts, vec![2, 1]);
                assert_eq!(p.abelian, vec![vec![3], vec![1, 0, 5]]);
                assert_eq!((p.first, p.last), (Some(0), Some(0)));
            }
            c => panic!("{c:?}"),
        }
        assert_eq!(
            sys.constraints[2].1,
            ParikhConstraint::Alphabetic { alph: vec![0, 1], first: Some(1), last: None }
        );
        let again = parse_product_system(&format_product_system(&sys)).unwrap();
        assert_eq!(again.constraints, sys.constraints);
        assert_eq!(again.equations.equations, sys.equations.equations);
        assert!(parse_product_system("factor x: Q\n").is_err());
        let over = parse_product_system_over(sys.spec.clone(), "eq: X Y = Z\nneq1: Z\n").unwrap();
        assert_eq!(over.equations.equations, sys.equations.equations[..1]);
        assert!(parse_product_system("eq: X = Y\nfactor x: Z\n").is_err());
        let spec = parse_product_spec("factor x: Z gens a\nfactor t: Z/2\n").unwrap();
        assert!(spec.alphabet.letter("a").is_some() && spec.alphabet.letter("th").is_some());
        assert_eq!(parse_product_spec(&format_product_spec(&spec)).unwrap().factors.len(), 2);
    }
}
