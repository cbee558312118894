//! Free operads by stages `F_0 = I`, `F_{s+1} = I ⊕ (M ∘ F_s)`, with a
//! basis of decorated trees, the adjunction with the forgetful functor, and
//! the checks that go with it.

mod adjunction;
mod tree;

pub use adjunction::{
    adjunction_counit, adjunction_unit, check_derivation, check_stage_inclusions, check_triangles, evaluate_tree,
    free_map, map_tree, theta, theta_inv,
};
pub use tree::{graft, graft_flat, parse_tree, FlatTree, TreeTerm};

use crate::dg::DgaModule;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::operad::Operad;
use crate::par::{par_map, Execution};
use crate::smodule::{composite, Composite, Flavor, SModMorphism, SModule};

/// The finite window `(max_arity, max_stage)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationParams {
    pub max_arity: usize,
    pub max_stage: usize,
}

impl TruncationParams {
    pub fn new(max_arity: usize, max_stage: usize) -> Self {
        TruncationParams { max_arity, max_stage }
    }
}

/// `F(M)_s`: the carrier with its tree basis. In arity 1 the identity tree
/// comes first, followed by the basis of `(M ∘ F_{s−1})(n)`.
#[derive(Clone, Debug)]
pub struct FreeStage {
    pub index: usize,
    pub carrier: SModule,
    pub trees: Vec<Vec<TreeTerm>>,
    composite: Option<Composite>,
}

impl FreeStage {
    /// Offset of the composite part in arity `n`.
    fn offset(n: usize) -> usize {
        usize::from(n == 1)
    }

    pub fn composite(&self) -> Option<&Composite> {
        self.composite.as_ref()
    }
}

#[derive(Clone, Debug)]
pub struct FreeOperad {
    name: String,
    generators: SModule,
    params: TruncationParams,
    stages: Vec<FreeStage>,
    unit: Vector,
}

fn identity_stage(generators: &SModule, max_arity: usize) -> FreeStage {
    let field = generators.field().clone();
    let mut comps: Vec<DgaModule> = (0..=max_arity).map(|_| DgaModule::zero(field.clone())).collect();
    if max_arity >= 1 {
        comps[1] = DgaModule::new(
            field.clone(),
            vec![("*1".into(), 0)],
            vec![Vector::new()],
            vec![field.one()],
            Some(Vector::basis(0, &field)),
        )
        .expect("identity component");
    }
    let actions = (0..=max_arity).map(|_| Vec::new()).collect();
    let mut trees: Vec<Vec<TreeTerm>> = vec![Vec::new(); max_arity + 1];
    if max_arity >= 1 {
        trees[1].push(TreeTerm::Unit);
    }
    FreeStage {
        index: 0,
        carrier: SModule::from_parts(generators.flavor(), field, comps, actions),
        trees,
        composite: None,
    }
}

fn next_stage(generators: &SModule, prev: &FreeStage, max_arity: usize, exec: Execution) -> Result<FreeStage> {
    let field = generators.field().clone();
    let comp = composite(generators, &prev.carrier, max_arity)?;
    let arities: Vec<usize> = (0..=max_arity).collect();
    let parts = par_map(exec, &arities, |&n| {
        let amb = comp.arity(n);
        let inner = comp.module().component(n);
        let off = FreeStage::offset(n);
        let mut trees = Vec::with_capacity(amb.dim() + off);
        if n == 1 {
            trees.push(TreeTerm::Unit);
        }
        for q in 0..amb.dim() {
            let key = amb.representative(q);
            trees.push(TreeTerm::Node {
                gen: key.top,
                children: key
                    .sizes
                    .iter()
                    .zip(&key.children)
                    .map(|(&a, &c)| prev.trees[a][c].clone())
                    .collect(),
                shuffle: key.shuffle.clone(),
            });
        }
        let mut basis = Vec::with_capacity(trees.len());
        let mut diff = Vec::with_capacity(trees.len());
        let mut aug = Vec::with_capacity(trees.len());
        if n == 1 {
            basis.push(("*1".to_string(), 0));
            diff.push(Vector::new());
            aug.push(field.one());
        }
        for q in 0..amb.dim() {
            basis.push((trees[q + off].render(generators), inner.degree(q)));
            diff.push(inner.d(q).reindex(|i| i + off));
            aug.push(inner.augmentation()[q].clone());
        }
        let eta = if n == 1 {
            Some(Vector::basis(0, &field))
        } else {
            inner.coaugmentation().map(|e| e.reindex(|i| i + off))
        };
        let module = DgaModule::new(field.clone(), basis, diff, aug, eta).expect("stage component");
        let actions: Vec<Matrix> = if n >= 2 {
            comp.module().actions(n).to_vec()
        } else {
            Vec::new()
        };
        (trees, module, actions)
    });
    let mut trees = Vec::with_capacity(parts.len());
    let mut comps = Vec::with_capacity(parts.len());
    let mut actions = Vec::with_capacity(parts.len());
    for (t, c, a) in parts {
        trees.push(t);
        comps.push(c);
        actions.push(a);
    }
    Ok(FreeStage {
        index: prev.index + 1,
        carrier: SModule::from_parts(generators.flavor(), field, comps, actions),
        trees,
        composite: Some(comp),
    })
}

impl FreeOperad {
    /// The free operad on `m` (symmetric or nonsymmetric according to its
    /// flavor) within `params`.
    pub fn new(m: &SModule, params: TruncationParams) -> Result<Self> {
        FreeOperad::with_execution(m, params, Execution::default())
    }

    pub fn with_execution(m: &SModule, params: TruncationParams, exec: Execution) -> Result<Self> {
        let generators = m.truncate(params.max_arity);
        let mut stages = vec![identity_stage(&generators, params.max_arity)];
        for _ in 0..params.max_stage {
            let next = next_stage(&generators, stages.last().unwrap(), params.max_arity, exec)?;
            stages.push(next);
        }
        let unit = if params.max_arity >= 1 {
            Vector::basis(0, generators.field())
        } else {
            Vector::new()
        };
        Ok(FreeOperad {
            name: "F".into(),
            generators,
            params,
            stages,
            unit,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn generators(&self) -> &SModule {
        &self.generators
    }

    pub fn params(&self) -> TruncationParams {
        self.params
    }

    pub fn stage(&self, s: usize) -> Result<&FreeStage> {
        self.stages
            .get(s)
            .ok_or_else(|| Error::Truncation(format!("stage {s} exceeds the maximal stage {}", self.params.max_stage)))
    }

    pub fn stages(&self) -> &[FreeStage] {
        &self.stages
    }

    fn top(&self) -> &FreeStage {
        self.stages.last().unwrap()
    }

    /// Tree of basis element `i` in arity `n` of the top stage.
    pub fn tree(&self, n: usize, i: usize) -> &TreeTerm {
        &self.top().trees[n][i]
    }

    pub fn trees(&self, n: usize) -> &[TreeTerm] {
        &self.top().trees[n]
    }

    /// Coordinates of a tree in `F_s`, by normalizing every vertex into the
    /// quotient presentation. `None` outside the window.
    pub fn embed_at(&self, t: &TreeTerm, s: usize) -> Option<Vector> {
        let n = t.arity();
        if n > self.params.max_arity || t.height() > s || s > self.params.max_stage {
            return None;
        }
        let field = self.generators.field();
        match t {
            TreeTerm::Unit => Some(Vector::basis(0, field)),
            TreeTerm::Node { gen, children, shuffle } => {
                let kids: Option<Vec<Vector>> = children.iter().map(|c| self.embed_at(c, s - 1)).collect();
                let comp = self.stages[s].composite.as_ref()?;
                let v = comp.project_expanded(*gen, &t.sizes(), &kids?, shuffle);
                Some(v.reindex(|i| i + FreeStage::offset(n)))
            }
        }
    }

    /// Coordinates in the top stage.
    pub fn embed(&self, t: &TreeTerm) -> Option<Vector> {
        self.embed_at(t, self.params.max_stage)
    }

    /// Coordinates of a linear combination of trees.
    pub fn embed_all<'a>(&self, terms: impl IntoIterator<Item = &'a (TreeTerm, crate::Scalar)>) -> Option<Vector> {
        let mut out = Vector::new();
        for (t, c) in terms {
            out.add_scaled(&self.embed(t)?, c);
        }
        Some(out)
    }

    /// The inclusion `i_s : F_s → F_{s+1}`.
    pub fn stage_inclusion(&self, s: usize) -> Result<SModMorphism> {
        if s + 1 > self.params.max_stage {
            return Err(Error::Truncation(format!("stage {} exceeds the maximal stage {}", s + 1, self.params.max_stage)));
        }
        let src = &self.stages[s];
        let dst = &self.stages[s + 1];
        let maps = (0..=self.params.max_arity)
            .map(|n| {
                let cols = src.trees[n]
                    .iter()
                    .map(|t| self.embed_at(t, s + 1).expect("stage-s tree lies in stage s+1"))
                    .collect();
                Matrix::from_columns(dst.carrier.dim(n), cols)
            })
            .collect();
        Ok(SModMorphism { maps })
    }

    /// `μ_{a,b}` on trees: grafting followed by normalization in stage
    /// `a + b`, then inclusion into the top stage.
    pub fn mu(&self, t: &TreeTerm, args: &[TreeTerm]) -> Option<Vector> {
        let (g, negative) = graft(t, args, &self.generators);
        let v = self.embed(&g)?;
        Some(if negative { v.negated() } else { v })
    }

    /// Dimensions of the top stage per arity, split by degree.
    pub fn graded_dims(&self) -> Vec<Vec<(i64, usize)>> {
        (0..=self.params.max_arity)
            .map(|n| self.top().carrier.component(n).graded_dims())
            .collect()
    }
}

impl Operad for FreeOperad {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn carrier(&self) -> &SModule {
        &self.top().carrier
    }

    fn unit(&self) -> &Vector {
        &self.unit
    }

    fn gamma(&self, top: usize, args: &[(usize, usize)]) -> Option<Vector> {
        let trees = &self.top().trees;
        let t = trees.get(args.len())?.get(top)?;
        let ss: Vec<TreeTerm> = args.iter().map(|&(a, y)| trees[a][y].clone()).collect();
        self.mu(t, &ss)
    }
}

/// The free nonsymmetric operad on an ℕ-module.
pub fn free_ns_operad(n: &SModule, params: TruncationParams) -> Result<FreeOperad> {
    if n.flavor() != Flavor::Nonsymmetric {
        return Err(Error::Precondition("expected an ℕ-module".into()));
    }
    FreeOperad::new(n, params)
}

/// The free symmetric operad on an 𝕊-module.
pub fn free_operad(m: &SModule, params: TruncationParams) -> Result<FreeOperad> {
    if m.flavor() != Flavor::Symmetric {
        return Err(Error::Precondition("expected an 𝕊-module".into()));
    }
    FreeOperad::new(m, params)
}
