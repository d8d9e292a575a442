//! The common channel of a broadcast channel and the structure built on it:
//! characteristic graph, effective input alphabet, decomposition kernel,
//! separation margins, and undetectable mixing kernels.
//!
//! Both receivers can compute the connected component of their own output
//! symbol in the characteristic graph, and those components agree with
//! probability one. The point-to-point channel from the input to that
//! component index is the common channel; everything a byzantine sender
//! cannot fake lives there.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::channel::{Alphabet, BroadcastChannel, PointToPointChannel};
use crate::math;
use crate::solver::simplex::{l1_mixture_fit, solve_standard_form, LpError};

/// A column is declared a polytope vertex when no convex combination of the
/// other distinct columns comes within this L1 distance of it.
pub const VERTEX_SEPARATION_TOL: f64 = 1e-6;
/// Required residual for decomposition certificates of non-vertex columns.
pub const CERTIFICATE_TOL: f64 = 1e-9;
/// Columns within this L1 distance are treated as the same polytope point.
pub const COLUMN_EQUALITY_TOL: f64 = 1e-9;

/// Bipartite graph on the two output alphabets with an edge for every output
/// pair that some input can produce.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicGraph {
    component_count: usize,
    phi_y: Vec<usize>,
    phi_z: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl CharacteristicGraph {
    /// Number of connected components among reachable output symbols.
    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Component label of each Y symbol. Unreachable symbols get fresh
    /// phantom labels `>= component_count` so that decoders stay total.
    pub fn phi_y(&self) -> &[usize] {
        &self.phi_y
    }

    /// Component label of each Z symbol (phantoms as for `phi_y`).
    pub fn phi_z(&self) -> &[usize] {
        &self.phi_z
    }

    /// Edges `(y, z)` with `W(y,z|x) > 0` for some `x`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// How far every input outside all vertex classes stays from being any
/// single vertex under the decomposition kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaMargin {
    Value(f64),
    /// Every input realizes a polytope vertex, so the minimum ranges over an
    /// empty set.
    Vacuous,
}

impl EtaMargin {
    pub fn value(&self) -> Option<f64> {
        match self {
            EtaMargin::Value(v) => Some(*v),
            EtaMargin::Vacuous => None,
        }
    }
}

impl fmt::Display for EtaMargin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaMargin::Value(v) => write!(f, "{v}"),
            EtaMargin::Vacuous => write!(f, "vacuous"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommonError {
    SingletonEffectiveAlphabet,
    KernelLp(LpError),
}

impl fmt::Display for CommonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommonError::SingletonEffectiveAlphabet => {
                write!(f, "effective input alphabet is a singleton")
            }
            CommonError::KernelLp(e) => write!(f, "mixing-kernel LP failed: {e}"),
        }
    }
}

impl core::error::Error for CommonError {}

/// A per-letter resampling map `P(x'|x)` that preserves the common-channel
/// output distribution of every input, hence is undetectable through the
/// common channel.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingKernel {
    n: usize,
    rows: Vec<f64>,
}

impl MixingKernel {
    pub fn identity(n: usize) -> Self {
        let mut rows = alloc::vec![0.0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1.0;
        }
        MixingKernel { n, rows }
    }

    pub fn from_rows(n: usize, rows: Vec<f64>) -> Self {
        assert_eq!(rows.len(), n * n);
        MixingKernel { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.rows[from * self.n + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.rows[from * self.n..(from + 1) * self.n]
    }

    /// Total off-diagonal mass; the objective maximized by
    /// [`CommonStructure::find_mixing_kernel`].
    pub fn off_diagonal_mass(&self) -> f64 {
        (0..self.n).map(|x| 1.0 - self.prob(x, x)).sum()
    }

    /// Worst-row L1 error of the membership constraint
    /// `sum_x' P(x'|x) W_V(.|x') = W_V(.|x)`.
    pub fn membership_error(&self, common_channel: &PointToPointChannel) -> f64 {
        let nv = common_channel.output().len();
        let mut worst: f64 = 0.0;
        for x in 0..self.n {
            let mut err = 0.0;
            for v in 0..nv {
                let mixed: f64 =
                    (0..self.n).map(|x2| self.prob(x, x2) * common_channel.prob(x2, v)).sum();
                err += math::abs(mixed - common_channel.prob(x, v));
            }
            worst = worst.max(err);
        }
        worst
    }
}

/// Everything derived from a broadcast channel's characteristic graph.
#[derive(Debug, Clone)]
pub struct CommonStructure {
    graph: CharacteristicGraph,
    common_channel: PointToPointChannel,
    /// `W(y,z|x,v)` flattened as `((x * nv + v) * ny + y) * nz + z`.
    conditional: Vec<f64>,
    /// Representatives of the polytope vertices, as input indices in
    /// declaration order.
    effective: Vec<usize>,
    /// For each representative, all inputs whose column equals that vertex.
    classes: Vec<Vec<usize>>,
    /// Decomposition kernel, `|X| x |U|` row-stochastic.
    ptilde: Vec<f64>,
    gamma: Option<f64>,
    eta: EtaMargin,
    ny: usize,
    nz: usize,
}

impl CommonStructure {
    pub fn graph(&self) -> &CharacteristicGraph {
        &self.graph
    }

    /// The common channel `W(v|x)`.
    pub fn common_channel(&self) -> &PointToPointChannel {
        &self.common_channel
    }

    /// `W(y,z|x,v)`; zero whenever the edge `(y,z)` is outside component `v`.
    pub fn conditional_prob(&self, x: usize, v: usize, y: usize, z: usize) -> f64 {
        let nv = self.common_channel.output().len();
        self.conditional[((x * nv + v) * self.ny + y) * self.nz + z]
    }

    /// Effective input alphabet: one representative input per polytope vertex.
    pub fn effective_alphabet(&self) -> &[usize] {
        &self.effective
    }

    /// Inputs realizing the same vertex as each representative.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Index of the class containing input `x`, if `x` realizes a vertex.
    pub fn class_of(&self, x: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&x))
    }

    /// Decomposition-kernel entry `P~(u|x)` (u indexes the effective alphabet).
    pub fn ptilde(&self, x: usize, u: usize) -> f64 {
        self.ptilde[x * self.effective.len() + u]
    }

    pub fn ptilde_row(&self, x: usize) -> &[f64] {
        let k = self.effective.len();
        &self.ptilde[x * k..(x + 1) * k]
    }

    /// Minimum L1 gap between any vertex column and the hull of the others.
    /// `Err(SingletonEffectiveAlphabet)` when fewer than two vertices exist.
    pub fn gamma_margin(&self) -> Result<f64, CommonError> {
        self.gamma.ok_or(CommonError::SingletonEffectiveAlphabet)
    }

    /// `min_u min_{x outside every class} (1 - P~(u|x))`, or vacuous when all
    /// inputs realize vertices.
    pub fn eta_margin(&self) -> EtaMargin {
        self.eta
    }

    /// The member of the undetectable-kernel polytope maximizing total
    /// off-diagonal mass. `restrict_to[x][x']` (when given) masks which
    /// transitions may carry mass; the unrestricted problem is always
    /// feasible because the identity kernel is a member.
    pub fn find_mixing_kernel(
        &self,
        restrict_to: Option<&[Vec<bool>]>,
    ) -> Result<MixingKernel, CommonError> {
        let nx = self.common_channel.input().len();
        let nv = self.common_channel.output().len();
        let mut rows = alloc::vec![0.0; nx * nx];
        // The constraints decouple by source letter: solve one LP per row.
        for x in 0..nx {
            let allowed: Vec<usize> = (0..nx)
                .filter(|&x2| restrict_to.map_or(true, |m| m[x][x2]))
                .collect();
            let n = allowed.len();
            let mut a = Vec::with_capacity(nv + 1);
            let mut b = Vec::with_capacity(nv + 1);
            for v in 0..nv {
                a.push(allowed.iter().map(|&x2| self.common_channel.prob(x2, v)).collect());
                b.push(self.common_channel.prob(x, v));
            }
            a.push(alloc::vec![1.0; n]);
            b.push(1.0);
            let c: Vec<f64> =
                allowed.iter().map(|&x2| if x2 == x { 1.0 } else { 0.0 }).collect();
            let sol = solve_standard_form(&a, &b, &c).map_err(CommonError::KernelLp)?;
            for (j, &x2) in allowed.iter().enumerate() {
                rows[x * nx + x2] = sol.x[j].max(0.0);
            }
            // Clean tiny LP drift so rows are exactly stochastic.
            let sum: f64 = rows[x * nx..(x + 1) * nx].iter().sum();
            for v in &mut rows[x * nx..(x + 1) * nx] {
                *v /= sum;
            }
        }
        Ok(MixingKernel { n: nx, rows })
    }

    /// Worst-entry error of `sum_v W(v|x) W(y,z|x,v) = W(y,z|x)`.
    pub fn reconstruction_error(&self, channel: &BroadcastChannel) -> f64 {
        let nv = self.common_channel.output().len();
        let mut worst: f64 = 0.0;
        for x in 0..channel.x_alphabet().len() {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    let recon: f64 = (0..nv)
                        .map(|v| self.common_channel.prob(x, v) * self.conditional_prob(x, v, y, z))
                        .sum();
                    worst = worst.max(math::abs(recon - channel.prob(x, y, z)));
                }
            }
        }
        worst
    }
}

/// Union-find with path compression.
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Attach the larger root under the smaller to keep canonical
            // component order tied to lowest vertex index.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Derives the full common structure of a broadcast channel.
///
/// Output symbols with zero marginal probability are ignored for component
/// analysis (they receive phantom labels); a singleton component set is a
/// valid degenerate result.
pub fn build_common_structure(channel: &BroadcastChannel) -> CommonStructure {
    let nx = channel.x_alphabet().len();
    let ny = channel.y_alphabet().len();
    let nz = channel.z_alphabet().len();

    // Characteristic graph over Y + Z vertices.
    let mut dsu = Dsu::new(ny + nz);
    let mut edges = Vec::new();
    let mut reach_y = alloc::vec![false; ny];
    let mut reach_z = alloc::vec![false; nz];
    for x in 0..nx {
        for (y, z, _) in channel.support_of(x) {
            reach_y[y] = true;
            reach_z[z] = true;
            if !edges.contains(&(y, z)) {
                edges.push((y, z));
            }
            dsu.union(y, ny + z);
        }
    }
    edges.sort_unstable();

    // Canonical component ids in order of root vertex index.
    let mut roots: Vec<usize> = Vec::new();
    for v in 0..ny + nz {
        let reachable = if v < ny { reach_y[v] } else { reach_z[v - ny] };
        if reachable {
            let r = dsu.find(v);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
    }
    roots.sort_unstable();
    let component_count = roots.len();
    let mut phantom = component_count;
    let mut phi_y = alloc::vec![0usize; ny];
    let mut phi_z = alloc::vec![0usize; nz];
    for y in 0..ny {
        phi_y[y] = if reach_y[y] {
            roots.iter().position(|&r| r == dsu.find(y)).expect("root recorded")
        } else {
            let id = phantom;
            phantom += 1;
            id
        };
    }
    for z in 0..nz {
        phi_z[z] = if reach_z[z] {
            roots.iter().position(|&r| r == dsu.find(ny + z)).expect("root recorded")
        } else {
            let id = phantom;
            phantom += 1;
            id
        };
    }

    // Common channel W(v|x) by summing the support inside each component.
    let mut wv = alloc::vec![0.0; nx * component_count];
    for x in 0..nx {
        for (y, _, p) in channel.support_of(x) {
            wv[x * component_count + phi_y[y]] += p;
        }
    }
    // Component labels: the first reachable Y symbol in each component.
    let mut v_names: Vec<String> = Vec::with_capacity(component_count);
    for v in 0..component_count {
        let name = (0..ny)
            .find(|&y| reach_y[y] && phi_y[y] == v)
            .map(|y| channel.y_alphabet().symbol(y).to_string())
            .unwrap_or_else(|| {
                let mut s = String::from("z:");
                let z = (0..nz).find(|&z| reach_z[z] && phi_z[z] == v).expect("non-empty");
                s.push_str(channel.z_alphabet().symbol(z));
                s
            });
        v_names.push(name);
    }
    let v_alphabet = Alphabet::new(v_names).expect("component labels are distinct");
    let common_channel = PointToPointChannel::new(
        channel.x_alphabet().clone(),
        v_alphabet,
        wv,
    )
    .expect("component masses sum to one per input");

    // Conditional W(y,z|x,v) with the 0/0 = 0 convention.
    let mut conditional = alloc::vec![0.0; nx * component_count * ny * nz];
    for x in 0..nx {
        for (y, z, p) in channel.support_of(x) {
            let v = phi_y[y];
            let mass = common_channel.prob(x, v);
            if mass > 0.0 {
                conditional[((x * component_count + v) * ny + y) * nz + z] = p / mass;
            }
        }
    }

    // Group inputs whose columns coincide, then classify vertices.
    let columns: Vec<Vec<f64>> = (0..nx).map(|x| common_channel.row(x).to_vec()).collect();
    let mut class_of = alloc::vec![usize::MAX; nx];
    let mut distinct: Vec<Vec<f64>> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for x in 0..nx {
        match distinct
            .iter()
            .position(|c| math::l1_distance(c, &columns[x]) <= COLUMN_EQUALITY_TOL)
        {
            Some(g) => {
                class_of[x] = g;
                members[g].push(x);
            }
            None => {
                class_of[x] = distinct.len();
                distinct.push(columns[x].clone());
                members.push(alloc::vec![x]);
            }
        }
    }

    // Vertex test by LP separation against the other distinct columns. A
    // group whose decomposition certificate over the current vertex set
    // fails the residual bound is promoted to vertex and the pass repeats.
    let groups = distinct.len();
    let mut is_vertex = alloc::vec![false; groups];
    if groups == 1 {
        is_vertex[0] = true;
    } else {
        for g in 0..groups {
            let others: Vec<Vec<f64>> = (0..groups)
                .filter(|&h| h != g)
                .map(|h| distinct[h].clone())
                .collect();
            let (_, residual) = l1_mixture_fit(&others, &distinct[g]);
            is_vertex[g] = residual > VERTEX_SEPARATION_TOL;
        }
        loop {
            let vertex_cols: Vec<Vec<f64>> = (0..groups)
                .filter(|&g| is_vertex[g])
                .map(|g| distinct[g].clone())
                .collect();
            let mut promoted = false;
            for g in 0..groups {
                if is_vertex[g] {
                    continue;
                }
                let (_, residual) = l1_mixture_fit(&vertex_cols, &distinct[g]);
                if residual > CERTIFICATE_TOL {
                    is_vertex[g] = true;
                    promoted = true;
                    break;
                }
            }
            if !promoted {
                break;
            }
        }
    }

    // Effective alphabet in declaration order of the representatives.
    let mut effective: Vec<usize> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for g in 0..groups {
        if is_vertex[g] {
            effective.push(members[g][0]);
            classes.push(members[g].clone());
        }
    }
    // members[g][0] is the smallest input index of the group; order classes
    // by that representative to keep declaration order.
    let mut order: Vec<usize> = (0..effective.len()).collect();
    order.sort_by_key(|&i| effective[i]);
    let effective: Vec<usize> = order.iter().map(|&i| effective[i]).collect();
    let classes: Vec<Vec<usize>> = order.iter().map(|&i| classes[i].clone()).collect();

    // Decomposition kernel rows.
    let k = effective.len();
    let vertex_cols: Vec<Vec<f64>> = effective.iter().map(|&u| columns[u].clone()).collect();
    let mut ptilde = alloc::vec![0.0; nx * k];
    for x in 0..nx {
        if let Some(u_idx) = classes.iter().position(|c| c.contains(&x)) {
            ptilde[x * k + u_idx] = 1.0;
        } else {
            let (mut weights, residual) = l1_mixture_fit(&vertex_cols, &columns[x]);
            debug_assert!(
                residual <= CERTIFICATE_TOL,
                "non-vertex column lacks a certificate: residual {residual}"
            );
            let sum: f64 = weights.iter().sum();
            for w in &mut weights {
                *w = (*w / sum).max(0.0);
            }
            ptilde[x * k..(x + 1) * k].copy_from_slice(&weights);
        }
    }

    // Separation margin between vertices.
    let gamma = if k >= 2 {
        let mut g = f64::INFINITY;
        for (i, col) in vertex_cols.iter().enumerate() {
            let others: Vec<Vec<f64>> = vertex_cols
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, c)| c.clone())
                .collect();
            let (_, residual) = l1_mixture_fit(&others, col);
            g = g.min(residual);
        }
        Some(g)
    } else {
        None
    };

    // Margin of inputs outside every vertex class.
    let outside: Vec<usize> = (0..nx)
        .filter(|&x| classes.iter().all(|c| !c.contains(&x)))
        .collect();
    let eta = if outside.is_empty() {
        EtaMargin::Vacuous
    } else {
        let mut m = f64::INFINITY;
        for &x in &outside {
            for u in 0..k {
                m = m.min(1.0 - ptilde[x * k + u]);
            }
        }
        EtaMargin::Value(m)
    };

    CommonStructure {
        graph: CharacteristicGraph { component_count, phi_y, phi_z, edges },
        common_channel,
        conditional,
        effective,
        classes,
        ptilde,
        gamma,
        eta,
        ny,
        nz,
    }
}
