//! Systems of word equations with constraints, and their solutions.

mod compress;
mod cuts;

pub use compress::{compress_generic, substitute_intervals, Compressed, Substituted};
pub use cuts::{compute_cuts, generic_solution, maximal_free_intervals, Atom, Class, CutDecomposition, GenericSolution, Occurrence};

use crate::alphabet::{is_variable_name, Alphabet, Named, Var, VarRef, Word};
use crate::error::{Error, Result};
use crate::num::Length;
use crate::query::equal_eval;
use crate::slp::Slp;

/// `lhs = rhs` over variables and their inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Vec<VarRef>,
    pub rhs: Vec<VarRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// `X ∈ {w}`.
    ConstantEq(Word),
    /// `X ∈ C` for a named set decided by a caller-supplied checker.
    Membership(String),
}

/// Decides `Membership` constraints.
pub trait MembershipChecker {
    fn contains(&self, set: &str, w: &Word) -> Result<bool>;
}

/// The checker used when none is supplied: every membership is an error.
pub struct NoMembership;

impl MembershipChecker for NoMembership {
    fn contains(&self, set: &str, _: &Word) -> Result<bool> {
        Err(Error::PreconditionViolated(format!("no checker for membership in {set}")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct EquationSystem {
    pub alphabet: Alphabet,
    pub variables: Vec<String>,
    pub equations: Vec<Equation>,
    pub constraints: Vec<(Var, Constraint)>,
}

impl EquationSystem {
    pub fn new(alphabet: Alphabet) -> Self {
        EquationSystem { alphabet, ..Default::default() }
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.variables.iter().position(|v| v == name).map(|i| Var(i as u32))
    }

    /// The variable named `name`, declared on first use.
    pub fn declare(&mut self, name: &str) -> Result<Var> {
        if let Some(v) = self.var(name) {
            return Ok(v);
        }
        if !is_variable_name(name) {
            return Err(Error::UnknownSymbol(format!("invalid variable name {name:?}")));
        }
        self.variables.push(name.to_string());
        Ok(Var(self.variables.len() as u32 - 1))
    }

    /// `X` or `~X`, declaring `X` if needed.
    pub fn declare_ref(&mut self, text: &str) -> Result<VarRef> {
        match text.strip_prefix('~') {
            Some(n) => Ok(self.declare(n)?.neg()),
            None => Ok(self.declare(text)?.pos()),
        }
    }

    /// Adds an equation written as two whitespace-separated lists of `X`/`~X`.
    pub fn add_equation(&mut self, lhs: &str, rhs: &str) -> Result<()> {
        let lhs = lhs.split_whitespace().map(|t| self.declare_ref(t)).collect::<Result<_>>()?;
        let rhs = rhs.split_whitespace().map(|t| self.declare_ref(t)).collect::<Result<_>>()?;
        self.equations.push(Equation { lhs, rhs });
        Ok(())
    }

    /// Adds `X ∈ {w}`.
    pub fn add_constant(&mut self, x: &str, w: &str) -> Result<()> {
        let v = self.declare(x)?;
        let w = self.alphabet.parse_word(w)?;
        self.constraints.push((v, Constraint::ConstantEq(w)));
        Ok(())
    }

    pub fn name(&self, x: Var) -> &str {
        &self.variables[x.index()]
    }

    pub fn display(&self, x: VarRef) -> String {
        Named { name: self.name(x.var), bar: x.bar }.to_string()
    }

    /// Denotational length `d = Σ |Lᵢ Rᵢ|`.
    pub fn denotational_length(&self) -> usize {
        self.equations.iter().map(|e| e.lhs.len() + e.rhs.len()).sum()
    }

    /// Whether `x` occurs in some equation.
    pub fn occurs(&self, x: Var) -> bool {
        self.equations.iter().any(|e| e.lhs.iter().chain(&e.rhs).any(|r| r.var == x))
    }

    /// Constrained variables that occur in no equation.
    pub fn unused_constraint_vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = self.constraints.iter().map(|c| c.0).filter(|&v| !self.occurs(v)).collect();
        out.dedup();
        out
    }
}

/// `σ: Ω₊ → Γ*`; `σ(X̄)` is the inverse of `σ(X)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Solution {
    pub words: Vec<Option<Word>>,
}

impl Solution {
    pub fn new(system: &EquationSystem) -> Self {
        Solution { words: vec![None; system.variables.len()] }
    }

    pub fn set(&mut self, x: Var, w: Word) {
        if self.words.len() <= x.index() {
            self.words.resize(x.index() + 1, None);
        }
        self.words[x.index()] = Some(w);
    }

    pub fn get(&self, x: Var) -> Option<&Word> {
        self.words.get(x.index()).and_then(Option::as_ref)
    }

    /// `σ(x)` with the involution applied for barred references.
    pub fn eval(&self, system: &EquationSystem, x: VarRef) -> Result<Word> {
        let w = self.get(x.var).ok_or_else(|| Error::MissingAssignment(system.name(x.var).to_string()))?;
        Ok(if x.bar { w.inverse(&system.alphabet) } else { w.clone() })
    }

    pub fn eval_side(&self, system: &EquationSystem, side: &[VarRef]) -> Result<Word> {
        let mut out = Vec::new();
        for &r in side {
            out.extend(self.eval(system, r)?.0);
        }
        Ok(Word(out))
    }
}

/// `σ(Lᵢ) = σ(Rᵢ)` for every equation and every constraint holds.
pub fn verify_solution_with(system: &EquationSystem, sigma: &Solution, checker: &dyn MembershipChecker) -> Result<bool> {
    for v in (0..system.variables.len() as u32).map(Var) {
        if (system.occurs(v) || system.constraints.iter().any(|c| c.0 == v)) && sigma.get(v).is_none() {
            return Err(Error::MissingAssignment(system.name(v).to_string()));
        }
    }
    for e in &system.equations {
        if sigma.eval_side(system, &e.lhs)? != sigma.eval_side(system, &e.rhs)? {
            return Ok(false);
        }
    }
    for (x, c) in &system.constraints {
        let w = sigma.eval(system, x.pos())?;
        let ok = match c {
            Constraint::ConstantEq(u) => &w == u,
            Constraint::Membership(set) => checker.contains(set, &w)?,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`verify_solution_with`] for systems without membership constraints.
pub fn verify_solution(system: &EquationSystem, sigma: &Solution) -> Result<bool> {
    verify_solution_with(system, sigma, &NoMembership)
}

/// A variable evaluating to the concatenation of the bound values of a side.
fn side_var<L: Length>(slp: &mut Slp<L>, system: &EquationSystem, binding: &[Option<VarRef>], side: &[VarRef]) -> Result<VarRef> {
    let mut parts = Vec::with_capacity(side.len());
    for r in side {
        let b = binding
            .get(r.var.index())
            .copied()
            .flatten()
            .ok_or_else(|| Error::MissingAssignment(system.name(r.var).to_string()))?;
        parts.push(b.flipped(r.bar));
    }
    Ok(match slp.concat_all(&parts)? {
        Some(v) => v,
        None => slp.empty_var(),
    })
}

/// Checks an SLP-compressed assignment without decompressing it. The SLP
/// must be over the alphabet of the system; `binding[X]` is the variable
/// evaluating to `σ(X)`.
pub fn verify_solution_compressed<L: Length>(
    system: &EquationSystem,
    slp: &Slp<L>,
    binding: &[Option<VarRef>],
) -> Result<bool> {
    if slp.alphabet() != &system.alphabet {
        return Err(Error::UnknownSymbol("the program and the system use different alphabets".into()));
    }
    for v in (0..system.variables.len() as u32).map(Var) {
        if (system.occurs(v) || system.constraints.iter().any(|c| c.0 == v))
            && binding.get(v.index()).copied().flatten().is_none()
        {
            return Err(Error::MissingAssignment(system.name(v).to_string()));
        }
    }
    for b in binding.iter().flatten() {
        if b.var.index() >= slp.num_vars() {
            return Err(Error::UnknownVariable(format!("{b:?}")));
        }
    }
    let mut work = slp.clone();
    for e in &system.equations {
        let l = side_var(&mut work, system, binding, &e.lhs)?;
        let r = side_var(&mut work, system, binding, &e.rhs)?;
        if !equal_eval(&work, l, r) {
            return Ok(false);
        }
    }
    for (x, c) in &system.constraints {
        match c {
            Constraint::ConstantEq(w) => {
                let target = work.push_word(w)?;
                if !equal_eval(&work, binding[x.index()].unwrap(), target) {
                    return Ok(false);
                }
            }
            Constraint::Membership(set) => {
                return Err(Error::PreconditionViolated(format!("no checker for membership in {set}")));
            }
        }
    }
    Ok(true)
}
