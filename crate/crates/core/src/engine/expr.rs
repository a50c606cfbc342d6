use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use crate::freegroup::{Letter, Sign, SignedAtom};
use crate::lexicon::SchemeItem;
use crate::term::{name, substitute, Binding, Cursor, Name, SyntaxError, Term};

/// Material enclosed by a conjugation pair `@a^-1 … @a`: it moves, rotates
/// and dissolves only as a whole.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub label: Name,
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    Atom(SignedAtom),
    Block(Block),
}

impl Item {
    pub fn as_atom(&self) -> Option<&SignedAtom> {
        match self {
            Item::Atom(a) => Some(a),
            Item::Block(_) => None,
        }
    }

    pub fn as_block(&self) -> Option<&Block> {
        match self {
            Item::Block(b) => Some(b),
            Item::Atom(_) => None,
        }
    }
}

/// A working expression: a product of atoms and blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EngineExpr {
    pub items: Vec<Item>,
}

impl EngineExpr {
    pub fn new(items: Vec<Item>) -> Self {
        EngineExpr { items }
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = SignedAtom>) -> Self {
        EngineExpr { items: atoms.into_iter().map(Item::Atom).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn has_blocks(&self) -> bool {
        self.items.iter().any(|i| matches!(i, Item::Block(_)))
    }

    /// Number of atoms at every depth.
    pub fn atom_count(&self) -> usize {
        fn count(items: &[Item]) -> usize {
            items
                .iter()
                .map(|i| match i {
                    Item::Atom(_) => 1,
                    Item::Block(b) => count(&b.items),
                })
                .sum()
        }
        count(&self.items)
    }

    /// Top-level atoms, or `None` if a block remains.
    pub fn flat_atoms(&self) -> Option<Vec<&SignedAtom>> {
        self.items.iter().map(Item::as_atom).collect()
    }

    /// The list of items containing the item addressed by `path`.
    pub fn level(&self, path: &[usize]) -> Option<&Vec<Item>> {
        let (_, outer) = path.split_last()?;
        let mut items = &self.items;
        for &k in outer {
            items = &items.get(k)?.as_block()?.items;
        }
        Some(items)
    }

    pub fn level_mut(&mut self, path: &[usize]) -> Option<&mut Vec<Item>> {
        let (_, outer) = path.split_last()?;
        let mut items = &mut self.items;
        for &k in outer {
            items = match items.get_mut(k)? {
                Item::Block(b) => &mut b.items,
                Item::Atom(_) => return None,
            };
        }
        Some(items)
    }

    pub fn get(&self, path: &[usize]) -> Option<&Item> {
        self.level(path)?.get(*path.last()?)
    }

    /// Paths of every item, depth first, left to right.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        fn walk(items: &[Item], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            for (k, it) in items.iter().enumerate() {
                prefix.push(k);
                out.push(prefix.clone());
                if let Item::Block(b) = it {
                    walk(&b.items, prefix, out);
                }
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        walk(&self.items, &mut Vec::new(), &mut out);
        out
    }

    /// Every level (the top level and each block's contents) with its path prefix.
    pub fn levels(&self) -> Vec<(Vec<usize>, &Vec<Item>)> {
        let mut out = vec![(Vec::new(), &self.items)];
        for p in self.paths() {
            if let Some(Item::Block(b)) = self.get(&p) {
                out.push((p, &b.items));
            }
        }
        out
    }

    pub fn map_terms(&mut self, f: &mut impl FnMut(&Term) -> Term) {
        fn go(items: &mut [Item], f: &mut impl FnMut(&Term) -> Term) {
            for it in items {
                match it {
                    Item::Atom(SignedAtom { letter: Letter::Form(t), .. }) => *t = f(t),
                    Item::Atom(_) => {}
                    Item::Block(b) => go(&mut b.items, f),
                }
            }
        }
        go(&mut self.items, f);
    }

    pub fn apply(&mut self, b: &Binding) {
        if !b.is_empty() {
            self.map_terms(&mut |t| substitute(t, b));
        }
    }

    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        fn go(items: &[Item], f: &mut impl FnMut(&Term)) {
            for it in items {
                match it {
                    Item::Atom(SignedAtom { letter: Letter::Form(t), .. }) => f(t),
                    Item::Atom(_) => {}
                    Item::Block(b) => go(&b.items, f),
                }
            }
        }
        go(&self.items, f);
    }

    pub fn identifiers(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| out.extend(t.identifiers()));
        out
    }

    pub fn meta_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| out.extend(t.meta_names()));
        out
    }

    pub fn block_labels(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for p in self.paths() {
            if let Some(Item::Block(b)) = self.get(&p) {
                out.insert(b.label.clone());
            }
        }
        out
    }

    /// Removes empty blocks and cancels adjacent ground inverse atoms at
    /// every level.
    pub fn normalize(&mut self) {
        normalize_items(&mut self.items);
    }

    /// Rendering with meta-variables and identifiers renamed by first
    /// occurrence and block labels dropped; equal keys mean equal states up
    /// to renaming.
    pub fn canonical_key(&self) -> String {
        let mut metas: BTreeMap<Name, usize> = BTreeMap::new();
        let mut idents: BTreeMap<Name, usize> = BTreeMap::new();
        let mut out = String::new();
        key_items(&self.items, &mut metas, &mut idents, &mut out);
        out
    }
}

fn normalize_items(items: &mut Vec<Item>) {
    let mut out: Vec<Item> = Vec::with_capacity(items.len());
    for it in items.drain(..) {
        match it {
            Item::Block(mut b) => {
                normalize_items(&mut b.items);
                if !b.items.is_empty() {
                    out.push(Item::Block(b));
                }
            }
            Item::Atom(a) => {
                if let Some(Item::Atom(top)) = out.last() {
                    if top.cancels(&a) && a.letter.is_ground() {
                        out.pop();
                        continue;
                    }
                }
                out.push(Item::Atom(a));
            }
        }
    }
    *items = out;
}

fn key_term(t: &Term, metas: &mut BTreeMap<Name, usize>, idents: &mut BTreeMap<Name, usize>, out: &mut String) {
    match t {
        Term::Const(c) => out.push_str(c),
        Term::Ident(i) => {
            let n = idents.len();
            let k = *idents.entry(i.clone()).or_insert(n);
            let _ = write!(out, "#{k}");
        }
        Term::Var(v) => {
            let n = metas.len();
            let k = *metas.entry(v.clone()).or_insert(n);
            let _ = write!(out, "?{k}");
        }
        Term::App(p, arg) => {
            let n = metas.len();
            let k = *metas.entry(p.clone()).or_insert(n);
            let _ = write!(out, "?{k}[");
            key_term(arg, metas, idents, out);
            out.push(']');
        }
        Term::Compound(f, args) => {
            out.push_str(f);
            out.push('(');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                key_term(a, metas, idents, out);
            }
            out.push(')');
        }
    }
}

fn key_items(items: &[Item], metas: &mut BTreeMap<Name, usize>, idents: &mut BTreeMap<Name, usize>, out: &mut String) {
    for it in items {
        match it {
            Item::Atom(a) => {
                match &a.letter {
                    Letter::Word(w) => {
                        out.push('\'');
                        out.push_str(w);
                    }
                    Letter::Form(t) => key_term(t, metas, idents, out),
                }
                if a.sign == Sign::Neg {
                    out.push('-');
                }
            }
            Item::Block(b) => {
                out.push('[');
                key_items(&b.items, metas, idents, out);
                out.push(']');
            }
        }
        out.push(' ');
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[Item]) -> fmt::Result {
    for (k, it) in items.iter().enumerate() {
        if k > 0 {
            f.write_str(" ")?;
        }
        match it {
            Item::Atom(a) => write!(f, "{a}")?,
            Item::Block(b) => {
                write!(f, "[{}:", b.label)?;
                if !b.items.is_empty() {
                    f.write_str(" ")?;
                    write_items(f, &b.items)?;
                }
                f.write_str("]")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for EngineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("1");
        }
        write_items(f, &self.items)
    }
}

/// Parses the rendering produced by `Display`. Constants in `phon` are words.
pub fn parse_expr(text: &str, phon: &BTreeSet<Name>) -> Result<EngineExpr, SyntaxError> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    if cur.rest().trim() == "1" {
        return Ok(EngineExpr::default());
    }
    let items = parse_level(&mut cur, phon, false)?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error("unexpected input after expression"));
    }
    Ok(EngineExpr { items })
}

fn parse_level(cur: &mut Cursor, phon: &BTreeSet<Name>, nested: bool) -> Result<Vec<Item>, SyntaxError> {
    let mut items = Vec::new();
    loop {
        cur.skip_ws();
        match cur.peek() {
            None => {
                return if nested { Err(cur.error("unclosed block")) } else { Ok(items) };
            }
            Some(']') if nested => {
                cur.bump();
                return Ok(items);
            }
            Some('[') => {
                cur.bump();
                let Some(label) = cur.name() else {
                    return Err(cur.error("expected a block label"));
                };
                let label = name(label);
                cur.expect(':')?;
                let inner = parse_level(cur, phon, true)?;
                items.push(Item::Block(Block { label, items: inner }));
            }
            Some(_) => {
                let t = cur.term()?;
                let sign = if cur.eat_str("^-1") { Sign::Neg } else { Sign::Pos };
                let letter = match t {
                    Term::Const(c) if phon.contains(&c) => Letter::Word(c),
                    other => Letter::Form(other),
                };
                items.push(Item::Atom(SignedAtom::new(letter, sign)));
            }
        }
    }
}

/// Builds engine items from scheme items: each expression meta-variable
/// pair encloses a block. `label` supplies block labels in order.
pub fn build_items(
    scheme: &[SchemeItem],
    b: &Binding,
    label: &mut impl FnMut() -> Name,
) -> Result<Vec<Item>, String> {
    let mut stack: Vec<(Name, Name, Vec<Item>)> = Vec::new();
    let mut top: Vec<Item> = Vec::new();
    for item in scheme {
        let atom = match item {
            SchemeItem::Phon(w, s) => Item::Atom(SignedAtom::new(Letter::Word(w.clone()), *s)),
            SchemeItem::Log(t, s) => Item::Atom(SignedAtom::new(Letter::Form(substitute(t, b)), *s)),
            SchemeItem::Meta(m, _) => {
                if stack.last().is_some_and(|(open, _, _)| open == m) {
                    let (_, lab, items) = stack.pop().unwrap();
                    let block = Item::Block(Block { label: lab, items });
                    match stack.last_mut() {
                        Some((_, _, outer)) => outer.push(block),
                        None => top.push(block),
                    }
                } else if stack.iter().any(|(open, _, _)| open == m) {
                    return Err(format!("conjugation pairs cross at `@{m}`"));
                } else {
                    stack.push((m.clone(), label(), Vec::new()));
                }
                continue;
            }
        };
        match stack.last_mut() {
            Some((_, _, items)) => items.push(atom),
            None => top.push(atom),
        }
    }
    if let Some((m, _, _)) = stack.last() {
        return Err(format!("unpaired expression meta-variable `@{m}`"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{parse_grammar, parse_rules};

    fn phon() -> BTreeSet<Name> {
        ["every", "man", "saw"].into_iter().map(name).collect()
    }

    #[test]
    fn display_and_parse_round_trip() {
        let src = "[a1: every man #x1^-1] #x1 saw [a2: s(A,B) [a3: P[#x1]^-1]]";
        let e = parse_expr(src, &phon()).unwrap();
        assert_eq!(e.to_string(), src);
        assert!(e.has_blocks());
        assert_eq!(e.atom_count(), 7);
        assert_eq!(parse_expr("1", &phon()).unwrap(), EngineExpr::default());
        assert!(parse_expr("[a1: man", &phon()).is_err());
    }

    #[test]
    fn normalization_cancels_ground_pairs_only() {
        let mut e = parse_expr("man man^-1 A A^-1 [a1: #x #x^-1] saw", &phon()).unwrap();
        e.normalize();
        assert_eq!(e.to_string(), "A A^-1 saw");
        let mut e = parse_expr("saw [a1: ] saw^-1", &phon()).unwrap();
        e.normalize();
        assert!(e.is_empty());
    }

    #[test]
    fn canonical_keys_ignore_names() {
        let a = parse_expr("[a1: s(A,#x3)] A^-1 #x3", &phon()).unwrap();
        let b = parse_expr("[a7: s(B_2,#x1)] B_2^-1 #x1", &phon()).unwrap();
        let c = parse_expr("[a7: s(B_2,#x1)] C^-1 #x1", &phon()).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_ne!(a.canonical_key(), c.canonical_key());
    }

    #[test]
    fn rule_rhs_builds_blocks() {
        let lex = parse_grammar(crate::ENGLISH).unwrap();
        let rules = parse_rules(&lex).unwrap().rules;
        let every = rules.iter().find(|r| &*r.lhs == "every").unwrap();
        let mut n = 0;
        let items = build_items(&every.rhs, &Binding::new(), &mut || {
            n += 1;
            name(&format!("a{n}"))
        })
        .unwrap();
        let e = EngineExpr::new(items);
        assert_eq!(e.to_string(), "[a1: ev(N,X,P[X]) P[X]^-1] X N^-1");
    }

    #[test]
    fn paths_and_levels() {
        let e = parse_expr("man [a1: saw [a2: every]] man", &phon()).unwrap();
        assert_eq!(e.paths(), vec![vec![0], vec![1], vec![1, 0], vec![1, 1], vec![1, 1, 0], vec![2]]);
        assert_eq!(e.levels().len(), 3);
        assert_eq!(e.get(&[1, 1, 0]).unwrap().as_atom().unwrap().to_string(), "every");
    }
}
