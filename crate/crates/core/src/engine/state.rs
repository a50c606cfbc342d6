use std::collections::BTreeSet;

use super::expr::{build_items, EngineExpr, Item};
use super::{Direction, DerivationStep, StepArg, StepContext, StepKind};
use crate::freegroup::{Letter, Sign, SignedAtom};
use crate::lexicon::SchemeItem;
use crate::term::{name, substitute, IdentifierSource, Name, Term};

/// An expression together with the counters that make fresh names
/// reproducible: replaying the same steps from the same start yields the
/// same names.
#[derive(Clone, Debug)]
pub struct State {
    pub expr: EngineExpr,
    /// Rule or relator instances created so far; instance `k` renames
    /// meta-variable `V` to `V_k`.
    pub instances: usize,
    pub blocks: usize,
    ids: IdentifierSource,
    seen: BTreeSet<Name>,
}

pub(crate) fn rename_term(t: &Term, k: usize) -> Term {
    t.rename_metas(&mut |v| name(&format!("{v}_{k}")))
}

pub(crate) fn rename_items(items: &[SchemeItem], k: usize) -> Vec<SchemeItem> {
    items
        .iter()
        .map(|it| match it {
            SchemeItem::Log(t, s) => SchemeItem::Log(rename_term(t, k), *s),
            other => other.clone(),
        })
        .collect()
}

/// Meta-variables used as abstraction arguments; they range over identifiers.
pub(crate) fn ident_vars(items: &[SchemeItem]) -> Vec<Name> {
    let mut out = Vec::new();
    for it in items {
        if let SchemeItem::Log(t, _) = it {
            t.walk(&mut |sub| {
                if let Term::App(_, arg) = sub {
                    if let Term::Var(v) = &**arg {
                        if !out.contains(v) {
                            out.push(v.clone());
                        }
                    }
                }
            });
        }
    }
    out
}

fn item_metas(items: &[SchemeItem]) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for it in items {
        if let SchemeItem::Log(t, _) = it {
            out.extend(t.meta_names());
        }
    }
    out
}

impl State {
    pub fn new(expr: EngineExpr) -> Self {
        let seen = expr.identifiers();
        State { ids: IdentifierSource::avoiding(seen.iter().cloned()), seen, expr, instances: 0, blocks: 0 }
    }

    fn fresh_ident(&mut self) -> Name {
        loop {
            if let Term::Ident(n) = self.ids.fresh() {
                if self.seen.insert(n.clone()) {
                    return n;
                }
            }
        }
    }

    fn next_label(&mut self) -> Name {
        self.blocks += 1;
        name(&format!("a{}", self.blocks))
    }

    /// Scheme items of the rule an `expand` step would use, with the
    /// renamed left-hand side when it is a logical form.
    fn rule_items(&self, ctx: &StepContext, rule: usize) -> Result<(Option<Term>, Vec<SchemeItem>), String> {
        let k = self.instances + 1;
        match ctx.direction {
            Direction::Generate => {
                let r = ctx.grammar.gen.get(rule).ok_or_else(|| format!("no generation rule r{rule}"))?;
                Ok((Some(rename_term(&r.lhs, k)), rename_items(&r.rhs, k)))
            }
            Direction::Parse => {
                let r = ctx.grammar.parse.get(rule).ok_or_else(|| format!("no parsing rule r{rule}"))?;
                Ok((None, rename_items(&r.rhs, k)))
            }
            Direction::Compute => Err("`expand` is not available in computations".into()),
        }
    }

    /// Identifiers an `expand` step must introduce fresh, in order, given
    /// the renamed rule. Does not change `self`.
    pub fn fresh_for_expand(&self, lhs: Option<&Term>, rhs: &[SchemeItem]) -> Vec<(Name, Name)> {
        let mut probe = self.clone();
        ident_vars(rhs)
            .into_iter()
            .filter(|v| !lhs.is_some_and(|l| l.contains_var(v)))
            .map(|v| (v, probe.fresh_ident()))
            .collect()
    }

    /// Applies one step after checking that it is legal.
    pub fn apply(&self, ctx: &StepContext, step: &DerivationStep) -> Result<State, String> {
        let mut next = self.clone();
        match step.kind {
            StepKind::Expand => next.expand(ctx, step)?,
            StepKind::Cancel => next.cancel(step)?,
            StepKind::Move => next.move_block(step)?,
            StepKind::Rotate => next.rotate(step)?,
            StepKind::Dissolve => next.dissolve(step)?,
            StepKind::Swap => {
                if !ctx.commutative {
                    return Err("`swap` requires commutative mode".into());
                }
                next.swap(step)?
            }
            StepKind::Insert => next.insert(ctx, step)?,
        }
        next.expr.normalize();
        Ok(next)
    }

    fn expand(&mut self, ctx: &StepContext, step: &DerivationStep) -> Result<(), String> {
        let rule = step.rule.ok_or("`expand` needs a rule")?;
        let atom = match self.expr.get(&step.path) {
            Some(Item::Atom(a)) if a.sign == Sign::Pos => a.clone(),
            Some(_) => return Err("`expand` needs a positive atom".into()),
            None => return Err(format!("no item at {:?}", step.path)),
        };
        let (lhs, rhs) = self.rule_items(ctx, rule)?;
        let b = &step.binding;
        let mut allowed = item_metas(&rhs);
        if let Some(l) = &lhs {
            allowed.extend(l.meta_names());
        }
        if let Some(v) = b.terms().map(|(v, _)| v).chain(b.abstractions().map(|(p, _)| p)).find(|v| !allowed.contains(*v)) {
            return Err(format!("binding mentions `{v}`, which is not a variable of this rule instance"));
        }
        if !b.is_acyclic() {
            return Err("cyclic binding".into());
        }
        match (&lhs, &atom.letter) {
            (Some(l), Letter::Form(t)) => {
                if substitute(l, b) != *t {
                    return Err(format!("rule left-hand side does not match `{t}` under {b}"));
                }
            }
            (None, Letter::Word(w)) => {
                if ctx.grammar.parse[rule].lhs != *w {
                    return Err(format!("rule r{rule} does not rewrite the word `{w}`"));
                }
            }
            _ => return Err(format!("`{atom}` cannot be expanded in {} mode", ctx.direction.as_str())),
        }
        for v in ident_vars(&rhs) {
            match b.term(&v) {
                Some(Term::Ident(_)) => {}
                _ => return Err(format!("identifier variable `{v}` is not bound to an identifier")),
            }
        }
        for (v, fresh) in self.fresh_for_expand(lhs.as_ref(), &rhs) {
            if b.term(&v) != Some(&Term::Ident(fresh.clone())) {
                return Err(format!("`{v}` must be bound to the fresh identifier #{fresh}"));
            }
            self.fresh_ident();
        }
        let items = build_items(&rhs, b, &mut || self.next_label())?;
        self.splice(&step.path, items)?;
        self.instances += 1;
        Ok(())
    }

    fn splice(&mut self, path: &[usize], items: Vec<Item>) -> Result<(), String> {
        let i = *path.last().ok_or("empty path")?;
        let level = self.expr.level_mut(path).ok_or("bad path")?;
        level.splice(i..=i, items);
        Ok(())
    }

    fn cancel(&mut self, step: &DerivationStep) -> Result<(), String> {
        let i = *step.path.last().ok_or("empty path")?;
        let level = self.expr.level(&step.path).ok_or("bad path")?;
        let (Some(Item::Atom(x)), Some(Item::Atom(y))) = (level.get(i), level.get(i + 1)) else {
            return Err("`cancel` needs two adjacent atoms".into());
        };
        if x.sign == y.sign {
            return Err(format!("`{x}` and `{y}` have the same sign"));
        }
        let b = &step.binding;
        let metas = self.expr.meta_names();
        if let Some(v) = b.terms().map(|(v, _)| v).chain(b.abstractions().map(|(p, _)| p)).find(|v| !metas.contains(*v)) {
            return Err(format!("binding mentions `{v}`, which does not occur in the expression"));
        }
        if !b.is_acyclic() {
            return Err("cyclic binding".into());
        }
        let equal = match (&x.letter, &y.letter) {
            (Letter::Form(s), Letter::Form(t)) => substitute(s, b) == substitute(t, b),
            (l, m) => l == m,
        };
        if !equal {
            return Err(format!("`{x}` and `{y}` are not made equal by {b}"));
        }
        let level = self.expr.level_mut(&step.path).ok_or("bad path")?;
        level.drain(i..=i + 1);
        self.expr.apply(b);
        Ok(())
    }

    fn block_level(&mut self, path: &[usize]) -> Result<(usize, &mut Vec<Item>), String> {
        let i = *path.last().ok_or("empty path")?;
        let level = self.expr.level_mut(path).ok_or("bad path")?;
        match level.get(i) {
            Some(Item::Block(_)) => Ok((i, level)),
            _ => Err(format!("no block at {path:?}")),
        }
    }

    fn move_block(&mut self, step: &DerivationStep) -> Result<(), String> {
        let StepArg::Index(j) = step.arg else { return Err("`move` needs a target slot".into()) };
        let (i, level) = self.block_level(&step.path)?;
        let block = level.remove(i);
        if j > level.len() {
            return Err(format!("slot {j} is out of range"));
        }
        level.insert(j, block);
        Ok(())
    }

    fn rotate(&mut self, step: &DerivationStep) -> Result<(), String> {
        let StepArg::Index(k) = step.arg else { return Err("`rotate` needs an amount".into()) };
        let (i, level) = self.block_level(&step.path)?;
        let Item::Block(b) = &mut level[i] else { unreachable!() };
        if k > b.items.len() {
            return Err(format!("rotation {k} exceeds block length {}", b.items.len()));
        }
        if !b.items.is_empty() {
            let n = b.items.len();
            b.items.rotate_left(k % n);
        }
        Ok(())
    }

    fn dissolve(&mut self, step: &DerivationStep) -> Result<(), String> {
        let (i, level) = self.block_level(&step.path)?;
        let Item::Block(b) = level.remove(i) else { unreachable!() };
        level.splice(i..i, b.items);
        Ok(())
    }

    fn swap(&mut self, step: &DerivationStep) -> Result<(), String> {
        let i = *step.path.last().ok_or("empty path")?;
        let level = self.expr.level_mut(&step.path).ok_or("bad path")?;
        if i + 1 >= level.len() {
            return Err("`swap` needs two adjacent items".into());
        }
        level.swap(i, i + 1);
        Ok(())
    }

    fn insert(&mut self, ctx: &StepContext, step: &DerivationStep) -> Result<(), String> {
        if ctx.direction != Direction::Compute {
            return Err("`insert` is only available in computations".into());
        }
        let r = step.rule.ok_or("`insert` needs a relator")?;
        let scheme = ctx.grammar.lexicon.relators.get(r).ok_or_else(|| format!("no relator r{r}"))?;
        let k = self.instances + 1;
        let items = rename_items(&scheme.items, k);
        let allowed = item_metas(&items);
        let b = &step.binding;
        if let Some(v) = b.terms().map(|(v, _)| v).chain(b.abstractions().map(|(p, _)| p)).find(|v| !allowed.contains(*v)) {
            return Err(format!("binding mentions `{v}`, which is not a variable of this relator instance"));
        }
        if !b.is_acyclic() {
            return Err("cyclic binding".into());
        }
        let conj: Vec<SignedAtom> = match &step.arg {
            StepArg::None => Vec::new(),
            StepArg::Conjugator(c) => c.clone(),
            StepArg::Index(_) => return Err("`insert` takes a conjugator, not an index".into()),
        };
        if conj.iter().any(|a| !a.letter.is_ground()) {
            return Err("conjugators must be ground".into());
        }
        let mut out: Vec<Item> = conj.iter().cloned().map(Item::Atom).collect();
        out.extend(build_items(&items, b, &mut || self.next_label())?);
        out.extend(conj.iter().rev().map(|a| Item::Atom(a.inverse())));
        let i = *step.path.last().ok_or("empty path")?;
        let level = self.expr.level_mut(&step.path).ok_or("bad path")?;
        if i > level.len() {
            return Err(format!("slot {i} is out of range"));
        }
        level.splice(i..i, out);
        self.instances = k;
        Ok(())
    }
}
