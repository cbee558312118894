use std::fmt::Write as _;

use crate::dg::reorder_negative;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::smodule::{label_lists, SModule};

/// A decorated composition tree: the identity, or a generator of arity
/// `children.len()` whose children are trees, with the leaves of child `j`
/// carrying the labels of block `j` of `shuffle`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeTerm {
    Unit,
    Node {
        gen: usize,
        children: Vec<TreeTerm>,
        shuffle: Permutation,
    },
}

impl TreeTerm {
    /// The one-vertex tree `g(*1, …, *h)`.
    pub fn corolla(gen: usize, arity: usize) -> TreeTerm {
        TreeTerm::Node {
            gen,
            children: vec![TreeTerm::Unit; arity],
            shuffle: Permutation::identity(arity),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            TreeTerm::Unit => 1,
            TreeTerm::Node { children, .. } => children.iter().map(TreeTerm::arity).sum(),
        }
    }

    /// Number of composition steps: 0 for the identity.
    pub fn height(&self) -> usize {
        match self {
            TreeTerm::Unit => 0,
            TreeTerm::Node { children, .. } => 1 + children.iter().map(TreeTerm::height).max().unwrap_or(0),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            TreeTerm::Unit => 0,
            TreeTerm::Node { children, .. } => 1 + children.iter().map(TreeTerm::vertex_count).sum::<usize>(),
        }
    }

    /// Sum of generator degrees.
    pub fn degree(&self, generators: &SModule) -> i64 {
        match self {
            TreeTerm::Unit => 0,
            TreeTerm::Node { gen, children, .. } => {
                generators.component(children.len()).degree(*gen)
                    + children.iter().map(|c| c.degree(generators)).sum::<i64>()
            }
        }
    }

    /// Generator degrees in preorder.
    pub fn vertex_degrees(&self, generators: &SModule, out: &mut Vec<i64>) {
        if let TreeTerm::Node { gen, children, .. } = self {
            out.push(generators.component(children.len()).degree(*gen));
            for c in children {
                c.vertex_degrees(generators, out);
            }
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        match self {
            TreeTerm::Unit => Vec::new(),
            TreeTerm::Node { children, .. } => children.iter().map(TreeTerm::arity).collect(),
        }
    }

    /// The same tree with leaves carrying global labels.
    pub fn to_flat(&self) -> FlatTree {
        let labels: Vec<usize> = (0..self.arity()).collect();
        self.to_flat_with(&labels)
    }

    fn to_flat_with(&self, labels: &[usize]) -> FlatTree {
        match self {
            TreeTerm::Unit => FlatTree::Leaf(labels[0]),
            TreeTerm::Node { gen, children, shuffle } => {
                let lists = label_lists(shuffle, &self.sizes());
                FlatTree::Vertex(
                    *gen,
                    children
                        .iter()
                        .zip(lists)
                        .map(|(c, l)| {
                            let sub: Vec<usize> = l.iter().map(|&k| labels[k]).collect();
                            c.to_flat_with(&sub)
                        })
                        .collect(),
                )
            }
        }
    }

    /// Serialized form `g(t1,…,th)` with leaves `*k` (1-based).
    pub fn render(&self, generators: &SModule) -> String {
        let mut s = String::new();
        self.to_flat().write(generators, &mut s);
        s
    }
}

/// A tree whose leaves carry explicit labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatTree {
    Leaf(usize),
    Vertex(usize, Vec<FlatTree>),
}

impl FlatTree {
    fn labels(&self, out: &mut Vec<usize>) {
        match self {
            FlatTree::Leaf(l) => out.push(*l),
            FlatTree::Vertex(_, cs) => cs.iter().for_each(|c| c.labels(out)),
        }
    }

    fn sorted_labels(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.labels(&mut v);
        v.sort_unstable();
        v
    }

    fn relabel(&self, f: &impl Fn(usize) -> usize) -> FlatTree {
        match self {
            FlatTree::Leaf(l) => FlatTree::Leaf(f(*l)),
            FlatTree::Vertex(g, cs) => FlatTree::Vertex(*g, cs.iter().map(|c| c.relabel(f)).collect()),
        }
    }

    fn vertex_count(&self) -> usize {
        match self {
            FlatTree::Leaf(_) => 0,
            FlatTree::Vertex(_, cs) => 1 + cs.iter().map(FlatTree::vertex_count).sum::<usize>(),
        }
    }

    fn vertex_degrees(&self, generators: &SModule, out: &mut Vec<i64>) {
        if let FlatTree::Vertex(g, cs) = self {
            out.push(generators.component(cs.len()).degree(*g));
            cs.iter().for_each(|c| c.vertex_degrees(generators, out));
        }
    }

    /// Back to shuffle coordinates; labels may be any distinct numbers.
    pub fn to_term(&self) -> TreeTerm {
        match self {
            FlatTree::Leaf(_) => TreeTerm::Unit,
            FlatTree::Vertex(g, cs) => {
                let all = self.sorted_labels();
                let rank = |l: usize| all.binary_search(&l).expect("label present");
                let mut images = Vec::with_capacity(all.len());
                for c in cs {
                    images.extend(c.sorted_labels().into_iter().map(rank));
                }
                TreeTerm::Node {
                    gen: *g,
                    children: cs.iter().map(FlatTree::to_term).collect(),
                    shuffle: Permutation::new(images).expect("labels are distinct"),
                }
            }
        }
    }

    /// True when the leaves read `0, 1, 2, …` from left to right.
    pub fn is_planar_ordered(&self) -> bool {
        let mut v = Vec::new();
        self.labels(&mut v);
        v.iter().enumerate().all(|(i, &l)| i == l)
    }

    fn write(&self, generators: &SModule, out: &mut String) {
        match self {
            FlatTree::Leaf(l) => {
                let _ = write!(out, "*{}", l + 1);
            }
            FlatTree::Vertex(g, cs) => {
                out.push_str(generators.component(cs.len()).name(*g));
                out.push('(');
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    c.write(generators, out);
                }
                out.push(')');
            }
        }
    }
}

/// Independent grafting on labeled trees: leaf `l` of `t` is replaced by
/// `args[l]` with its labels shifted past the earlier arguments. The sign is
/// the Koszul sign of moving the argument vertices into preorder.
pub fn graft_flat(t: &TreeTerm, args: &[TreeTerm], generators: &SModule) -> (TreeTerm, bool) {
    let mut offsets = Vec::with_capacity(args.len());
    let mut off = 0;
    for a in args {
        offsets.push(off);
        off += a.arity();
    }
    let flat_args: Vec<FlatTree> = args
        .iter()
        .zip(&offsets)
        .map(|(a, &o)| a.to_flat().relabel(&|l| l + o))
        .collect();
    // tag every vertex by its position in the original concatenation
    let mut before = Vec::new();
    t.vertex_degrees(generators, &mut before);
    let mut starts = Vec::with_capacity(args.len());
    for a in &flat_args {
        starts.push(before.len());
        a.vertex_degrees(generators, &mut before);
    }
    let mut order = Vec::new();
    let mut next_top = 0;
    let grafted = substitute(&t.to_flat(), &flat_args, &starts, &mut next_top, &mut order);
    (grafted.to_term(), reorder_negative(&before, &order))
}

fn substitute(
    t: &FlatTree,
    args: &[FlatTree],
    starts: &[usize],
    next_top: &mut usize,
    order: &mut Vec<usize>,
) -> FlatTree {
    match t {
        FlatTree::Leaf(l) => {
            let a = &args[*l];
            order.extend(starts[*l]..starts[*l] + a.vertex_count());
            a.clone()
        }
        FlatTree::Vertex(g, cs) => {
            order.push(*next_top);
            *next_top += 1;
            FlatTree::Vertex(*g, cs.iter().map(|c| substitute(c, args, starts, next_top, order)).collect())
        }
    }
}

/// Grafting by the recursion on the root: child `i` of `t` receives the
/// arguments plugged into its leaves. Returns the tree and whether the
/// Koszul sign is negative.
pub fn graft(t: &TreeTerm, args: &[TreeTerm], generators: &SModule) -> (TreeTerm, bool) {
    match t {
        TreeTerm::Unit => (args[0].clone(), false),
        TreeTerm::Node { gen, children, shuffle } => {
            let sizes = t.sizes();
            let lists = label_lists(shuffle, &sizes);
            let mut offsets = Vec::with_capacity(args.len());
            let mut off = 0;
            for a in args {
                offsets.push(off);
                off += a.arity();
            }
            // degrees of [T_1..T_k, S_1..S_h] and the target arrangement
            let k = children.len();
            let mut degrees: Vec<i64> = children.iter().map(|c| c.degree(generators)).collect();
            degrees.extend(args.iter().map(|a| a.degree(generators)));
            let mut order = Vec::with_capacity(k + args.len());
            let mut negative = false;
            let mut new_children = Vec::with_capacity(k);
            let mut images = Vec::new();
            for (i, c) in children.iter().enumerate() {
                order.push(i);
                order.extend(lists[i].iter().map(|&l| k + l));
                let sub: Vec<TreeTerm> = lists[i].iter().map(|&l| args[l].clone()).collect();
                let (g, neg) = graft(c, &sub, generators);
                negative ^= neg;
                new_children.push(g);
                for &l in &lists[i] {
                    images.extend(offsets[l]..offsets[l] + args[l].arity());
                }
            }
            negative ^= reorder_negative(&degrees, &order);
            (
                TreeTerm::Node {
                    gen: *gen,
                    children: new_children,
                    shuffle: Permutation::new(images).expect("blocks partition the leaves"),
                },
                negative,
            )
        }
    }
}

/// Parses `g(t1,…,th)` / `*k` against the generator names of `generators`.
/// Leaves must be labeled `1..n` exactly once.
pub fn parse_tree(s: &str, generators: &SModule) -> Result<TreeTerm> {
    let mut names: Vec<(String, usize, usize)> = Vec::new();
    for a in 0..generators.stored_arities() {
        let c = generators.component(a);
        for i in 0..c.dim() {
            names.push((c.name(i).to_string(), a, i));
        }
    }
    names.sort_by(|x, y| y.0.len().cmp(&x.0.len()).then(x.0.cmp(&y.0)));
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let flat = parse_node(&chars, &mut pos, &names)?;
    if pos != chars.len() {
        return Err(Error::Precondition(format!("unexpected text after tree at column {}", pos + 1)));
    }
    let mut labels = flat.sorted_labels();
    labels.dedup();
    let n = flat.sorted_labels().len();
    if labels.len() != n || labels.iter().enumerate().any(|(i, &l)| i != l) {
        return Err(Error::Precondition("leaf labels must be 1..n, each once".into()));
    }
    Ok(flat.to_term())
}

fn parse_node(chars: &[char], pos: &mut usize, names: &[(String, usize, usize)]) -> Result<FlatTree> {
    if chars.get(*pos) == Some(&'*') {
        *pos += 1;
        let start = *pos;
        while chars.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
            *pos += 1;
        }
        let digits: String = chars[start..*pos].iter().collect();
        let k: usize = digits
            .parse()
            .map_err(|_| Error::Precondition(format!("expected a leaf number at column {}", start + 1)))?;
        if k == 0 {
            return Err(Error::Precondition("leaf labels start at 1".into()));
        }
        return Ok(FlatTree::Leaf(k - 1));
    }
    let rest: String = chars[*pos..].iter().collect();
    let mut last_err = None;
    for (name, arity, idx) in names {
        if !rest.starts_with(&format!("{name}(")) {
            continue;
        }
        let mut p = *pos + name.chars().count() + 1;
        let mut children = Vec::new();
        let ok = (|| -> Result<()> {
            if chars.get(p) == Some(&')') {
                p += 1;
                return Ok(());
            }
            loop {
                children.push(parse_node(chars, &mut p, names)?);
                match chars.get(p) {
                    Some(',') => p += 1,
                    Some(')') => {
                        p += 1;
                        return Ok(());
                    }
                    _ => return Err(Error::Precondition(format!("expected ',' or ')' at column {}", p + 1))),
                }
            }
        })();
        match ok {
            Ok(()) if children.len() == *arity => {
                *pos = p;
                return Ok(FlatTree::Vertex(*idx, children));
            }
            Ok(()) => {
                last_err = Some(Error::ArityMismatch(format!(
                    "{name} has arity {arity} but {} children",
                    children.len()
                )))
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Precondition(format!("unknown generator at column {}", *pos + 1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::DgaModule;
    use crate::scalar::Field;
    use crate::smodule::free_h;

    fn binary(degree: i64) -> SModule {
        let f = Field::Rational;
        SModule::nonsymmetric(
            f.clone(),
            vec![
                DgaModule::zero(f.clone()),
                DgaModule::zero(f.clone()),
                DgaModule::free(f, vec![("g".into(), degree)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn render_and_parse_roundtrip() {
        let m = binary(0);
        let t = parse_tree("g(*1,g(*2,*3))", &m).unwrap();
        assert_eq!(t.arity(), 3);
        assert_eq!(t.height(), 2);
        assert_eq!(t.render(&m), "g(*1,g(*2,*3))");
        let s = parse_tree("g(g(*3,*1),*2)", &m).unwrap();
        assert_eq!(s.render(&m), "g(g(*3,*1),*2)");
        assert!(parse_tree("g(*1,*1)", &m).is_err());
        assert!(parse_tree("g(*1)", &m).is_err());
    }

    #[test]
    fn parse_handles_parenthesized_names() {
        let h = free_h(&binary(0));
        let t = parse_tree("g(2,1)(*2,g(1,2)(*1,*3))", &h).unwrap();
        assert_eq!(t.render(&h), "g(2,1)(*2,g(1,2)(*1,*3))");
    }

    #[test]
    fn recursion_matches_flat_grafting() {
        let m = binary(1);
        let trees = [
            "*1",
            "g(*1,*2)",
            "g(*2,*1)",
            "g(g(*1,*3),*2)",
            "g(*3,g(*2,*1))",
        ]
        .map(|s| parse_tree(s, &m).unwrap());
        for t in &trees {
            for a in &trees {
                for b in &trees {
                    for c in &trees {
                        let args: Vec<TreeTerm> = [a, b, c].iter().take(t.arity()).map(|x| (*x).clone()).collect();
                        assert_eq!(graft(t, &args, &m), graft_flat(t, &args, &m));
                    }
                }
            }
        }
    }

    #[test]
    fn grafting_odd_generators_has_sign() {
        let m = binary(1);
        let g = TreeTerm::corolla(0, 2);
        // moving the second argument vertex past the first costs a sign
        let (t, neg) = graft(&g, &[g.clone(), g.clone()], &m);
        assert_eq!(t.render(&m), "g(g(*1,*2),g(*3,*4))");
        assert!(!neg);
        let (_, neg) = graft(&parse_tree("g(*2,*1)", &m).unwrap(), &[g.clone(), g.clone()], &m);
        assert!(neg);
    }
}
