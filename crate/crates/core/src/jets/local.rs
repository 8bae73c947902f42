//! Functions on the neighborhood `U(x)`: the union of the level-`m_0` cells meeting at `x`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractal::{
    build_level_graph, canonical_vertex, symmetry_action, words, FractalDescriptor, GroupElement,
    VertexAddress,
};
use crate::harmonic::VertexFunction;
use crate::linalg::Matrix;
use crate::rational::Rational;

use super::field::{denormalize, normalize};
use super::{EasyBasis, Jet, Multiharmonic};

/// One cell `F_w K` of `U(x)` with `x = F_w q_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartCell {
    pub word: Vec<usize>,
    pub corner: usize,
    /// Canonical addresses of `F_w q_c`.
    pub corners: Vec<VertexAddress>,
}

#[derive(Clone, Debug)]
pub struct LocalChart {
    pub fractal: FractalDescriptor,
    pub center: VertexAddress,
    /// `m_0`: the level at which `x` first appears.
    pub level: usize,
    /// Sorted by word.
    pub cells: Vec<ChartCell>,
}

impl LocalChart {
    pub fn new(fractal: &FractalDescriptor, x: &VertexAddress) -> Result<Self> {
        if x.is_boundary() {
            return Err(Error::Domain(format!("{x} is a boundary point")));
        }
        let x = canonical_vertex(fractal, &x.word(), x.corner());
        let m0 = x.level();
        let g = build_level_graph(fractal, m0);
        let i = g
            .index_of(&x)
            .ok_or_else(|| Error::Domain(format!("{x} not in V_{m0}")))?;
        let mut cells: Vec<ChartCell> = g
            .cells_of(i)
            .iter()
            .map(|&k| {
                let word = g.cell_word(k).to_vec();
                let corner = g
                    .cell(k)
                    .iter()
                    .position(|&y| y == i)
                    .expect("cell contains vertex");
                let corners = (0..fractal.n_boundary)
                    .map(|c| canonical_vertex(fractal, &word, c))
                    .collect();
                ChartCell {
                    word,
                    corner,
                    corners,
                }
            })
            .collect();
        cells.sort_by(|a, b| a.word.cmp(&b.word));
        Ok(LocalChart {
            fractal: fractal.clone(),
            center: x,
            level: m0,
            cells,
        })
    }

    pub fn is_junction(&self) -> bool {
        self.cells.len() > 1
    }

    fn check_level(&self, m: usize) -> Result<()> {
        if m < self.level {
            return Err(Error::Domain(format!(
                "U_{m}({}) needs m >= {}",
                self.center, self.level
            )));
        }
        Ok(())
    }

    /// `F_l^{d} q_c` relative to cell `cell`.
    fn ray_point(&self, cell: usize, depth: usize, c: usize) -> VertexAddress {
        let fix = self.fractal.fixing_map(self.cells[cell].corner);
        canonical_vertex(&self.fractal, &vec![fix; depth], c)
    }

    /// `∂U_m(x)` as `(cell, corner, point)`.
    pub fn shell(&self, m: usize) -> Result<Vec<(usize, usize, VertexAddress)>> {
        self.check_level(m)?;
        let mut out = Vec::new();
        for (k, cell) in self.cells.iter().enumerate() {
            for c in (0..self.fractal.n_boundary).filter(|&c| c != cell.corner) {
                out.push((
                    k,
                    c,
                    self.globalize(k, &self.ray_point(k, m - self.level, c)),
                ));
            }
        }
        Ok(out)
    }

    /// Vertices of `U_m(x)` at level `m + depth`.
    pub fn vertices(&self, m: usize, depth: usize) -> Result<Vec<VertexAddress>> {
        self.check_level(m)?;
        let f = &self.fractal;
        let mut out = std::collections::BTreeSet::new();
        for (k, cell) in self.cells.iter().enumerate() {
            let prefix = vec![f.fixing_map(cell.corner); m - self.level];
            for tail in words(f.n_maps, depth) {
                let mut w = prefix.clone();
                w.extend(tail);
                for c in 0..f.n_boundary {
                    out.insert(self.globalize(k, &canonical_vertex(f, &w, c)));
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    pub fn globalize(&self, cell: usize, rel: &VertexAddress) -> VertexAddress {
        let mut w = self.cells[cell].word.clone();
        w.extend(rel.word());
        canonical_vertex(&self.fractal, &w, rel.corner())
    }

    /// `(cell, address within the cell)` for `y`; `None` for `y = x`.
    pub fn locate(&self, y: &VertexAddress) -> Result<Option<(usize, VertexAddress)>> {
        if *y == self.center {
            return Ok(None);
        }
        let yw = y.word();
        for (k, cell) in self.cells.iter().enumerate() {
            if let Some(c) = cell.corners.iter().position(|v| v == y) {
                return Ok(Some((k, VertexAddress::boundary(c))));
            }
            if yw.len() > self.level && yw[..self.level] == cell.word[..] {
                return Ok(Some((
                    k,
                    canonical_vertex(&self.fractal, &yw[self.level..], y.corner()),
                )));
            }
        }
        Err(Error::Domain(format!("{y} is not in U({})", self.center)))
    }

    fn stabilizer(&self, l: usize) -> Vec<&GroupElement> {
        self.fractal
            .group()
            .elements()
            .iter()
            .filter(|g| g.boundary[l] == l)
            .collect()
    }

    fn mover(&self, from: usize, to: usize) -> &GroupElement {
        self.fractal
            .group()
            .elements()
            .iter()
            .find(|g| g.boundary[from] == to)
            .expect("transitive on the boundary")
    }

    /// Local reflections at the corner: `g_x` on D3, `g_{x,1}, g_{x,2}` on D4.
    fn reflections(&self, l: usize) -> Vec<&GroupElement> {
        let n0 = self.fractal.n_boundary;
        let inv: Vec<&GroupElement> = self
            .stabilizer(l)
            .into_iter()
            .filter(|g| {
                let fixed = (0..n0).filter(|&c| g.boundary[c] == c).count();
                fixed == n0 - 2 && (0..n0).all(|c| g.boundary[g.boundary[c]] == c)
            })
            .collect();
        if inv.len() == 1 {
            return inv;
        }
        (1..=n0 - 2)
            .filter_map(|i| {
                inv.iter()
                    .copied()
                    .find(|g| g.boundary[(l + i) % n0] == (l + i) % n0)
            })
            .collect()
    }

    fn map_in_cell(
        &self,
        g: &GroupElement,
        rel: &VertexAddress,
        target: usize,
    ) -> Result<VertexAddress> {
        let img = symmetry_action(&self.fractal, &g.boundary, rel)?;
        Ok(self.globalize(target, &img))
    }
}

/// An element of `H_n(U(x))`, stored as jets at the corners of each cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalFunction {
    pub order: usize,
    /// `corner_jets[cell][c]` is the jet at `F_w q_c`; the entry at `x` is shared.
    pub corner_jets: Vec<Vec<Jet>>,
}

impl LocalFunction {
    fn unknowns(chart: &LocalChart, n: usize) -> usize {
        (n + 1) * (1 + chart.cells.len() * (chart.fractal.n_boundary - 1))
    }

    fn slot(chart: &LocalChart, n: usize, cell: usize, c: usize, k: usize) -> usize {
        let l = chart.cells[cell].corner;
        if c == l {
            return k;
        }
        let rank = if c < l { c } else { c - 1 };
        (n + 1) * (1 + cell * (chart.fractal.n_boundary - 1) + rank) + k
    }

    fn from_unknowns(chart: &LocalChart, n: usize, v: &[Rational]) -> Self {
        let corner_jets = (0..chart.cells.len())
            .map(|cell| {
                (0..chart.fractal.n_boundary)
                    .map(|c| {
                        Jet((0..=n)
                            .map(|k| v[Self::slot(chart, n, cell, c, k)].clone())
                            .collect())
                    })
                    .collect()
            })
            .collect();
        LocalFunction {
            order: n,
            corner_jets,
        }
    }

    /// Restriction of a global multiharmonic function.
    pub fn restrict(u: &Multiharmonic, chart: &LocalChart) -> Self {
        let corner_jets = chart
            .cells
            .iter()
            .map(|cell| cell.corners.iter().map(|v| u.jet_at(v)).collect())
            .collect();
        LocalFunction {
            order: u.order(),
            corner_jets,
        }
    }

    /// The symmetric local monomial `P_{j1}`: `Δ^i P(x) = δ_{ij}` with vanishing normal and transverse data.
    pub fn symmetric_monomial(
        basis: &EasyBasis,
        chart: &LocalChart,
        n: usize,
        j: usize,
    ) -> Result<Self> {
        if j > n || n > basis.order() {
            return Err(Error::Domain(format!(
                "monomial degree {j} with order {n} and basis order {}",
                basis.order()
            )));
        }
        let k = &basis.constants;
        let f = &chart.fractal;
        let side = f.degree0();
        let w: Vec<Rational> = (0..=n)
            .map(|t| f.rho.pow((chart.level * t) as i32))
            .collect();
        let mut v = vec![Rational::zero(); n + 1];
        for i in (0..=n).rev() {
            let mut s = Rational::zero();
            if j >= i {
                s += &w[j - i] * &k.a[j - i];
            }
            for t in 1..=n - i {
                s += &w[t] * &side * &k.b[t] * &v[i + t];
            }
            v[i] = -s.checked_div(&(&side * &k.b[0]))?;
        }
        let corner_jets = chart
            .cells
            .iter()
            .map(|cell| {
                (0..f.n_boundary)
                    .map(|c| {
                        if c == cell.corner {
                            Jet::unit(n, j)
                        } else {
                            Jet(v.clone())
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(LocalFunction {
            order: n,
            corner_jets,
        })
    }

    pub fn center(&self, chart: &LocalChart) -> &Jet {
        &self.corner_jets[0][chart.cells[0].corner]
    }

    /// Matching residuals at `x`, orders `0..=n`.
    pub fn matching_residuals(&self, basis: &EasyBasis, chart: &LocalChart) -> Vec<Rational> {
        (0..=self.order)
            .map(|i| {
                chart
                    .cells
                    .iter()
                    .zip(&self.corner_jets)
                    .map(|(cell, jets)| {
                        let refs: Vec<&[Rational]> = jets.iter().map(|j| j.0.as_slice()).collect();
                        basis.normal_derivative(&refs, cell.corner, i, chart.level)
                    })
                    .sum()
            })
            .collect()
    }

    pub fn jet_in_cell(
        &self,
        basis: &EasyBasis,
        chart: &LocalChart,
        cell: usize,
        rel: &VertexAddress,
    ) -> Jet {
        let refs: Vec<&Jet> = self.corner_jets[cell].iter().collect();
        let mut g = normalize(&refs, &chart.fractal.rho, chart.level);
        for i in rel.word() {
            g = basis
                .child_for(i, self.order)
                .mul_vec(&g)
                .expect("child map shape");
        }
        denormalize(
            &g,
            rel.corner(),
            self.order,
            &chart.fractal.rho,
            chart.level + rel.word_len(),
        )
    }

    pub fn jet_at(&self, basis: &EasyBasis, chart: &LocalChart, y: &VertexAddress) -> Result<Jet> {
        Ok(match chart.locate(y)? {
            None => self.center(chart).clone(),
            Some((cell, rel)) => self.jet_in_cell(basis, chart, cell, &rel),
        })
    }

    pub fn value_at(
        &self,
        basis: &EasyBasis,
        chart: &LocalChart,
        y: &VertexAddress,
    ) -> Result<Rational> {
        Ok(self.jet_at(basis, chart, y)?.0.swap_remove(0))
    }

    /// Values on the vertices of `U_m(x)` at level `m + depth`.
    pub fn sample(
        &self,
        basis: &EasyBasis,
        chart: &LocalChart,
        m: usize,
        depth: usize,
    ) -> Result<VertexFunction> {
        let mut out = VertexFunction::new(m + depth);
        for y in chart.vertices(m, depth)? {
            let v = self.value_at(basis, chart, &y)?;
            out.insert(y, v);
        }
        Ok(out)
    }

    fn combine(&self, other: &Self, s: &Rational) -> Self {
        let corner_jets = self
            .corner_jets
            .iter()
            .zip(&other.corner_jets)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| Jet(x.0.iter().zip(&y.0).map(|(p, q)| p + s * q).collect()))
                    .collect()
            })
            .collect();
        LocalFunction {
            order: self.order,
            corner_jets,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &-Rational::one())
    }

    pub fn add_scaled(&self, other: &Self, s: &Rational) -> Self {
        self.combine(other, s)
    }

    fn map_jets(&self, chart: &LocalChart, mut f: impl FnMut(usize, usize) -> Jet) -> Self {
        let corner_jets = (0..chart.cells.len())
            .map(|cell| (0..chart.fractal.n_boundary).map(|c| f(cell, c)).collect())
            .collect();
        LocalFunction {
            order: self.order,
            corner_jets,
        }
    }

    fn average(jets: Vec<&Jet>) -> Jet {
        let d = Rational::from_integer(jets.len() as i64);
        let n = jets[0].order();
        Jet((0..=n)
            .map(|k| jets.iter().map(|j| &j.0[k]).sum::<Rational>() / d.clone())
            .collect())
    }

    /// Average of `h ∘ g` over the stabilizer of `x` in each cell.
    fn symmetrize(&self, chart: &LocalChart) -> Self {
        self.map_jets(chart, |cell, c| {
            let stab = chart.stabilizer(chart.cells[cell].corner);
            Self::average(
                stab.iter()
                    .map(|g| &self.corner_jets[cell][g.boundary[c]])
                    .collect(),
            )
        })
    }

    /// Average over the cells of `U(x)`, each carried onto the others by a symmetry.
    fn rotate(&self, chart: &LocalChart) -> Self {
        self.map_jets(chart, |cell, c| {
            let l = chart.cells[cell].corner;
            Self::average(
                chart
                    .cells
                    .iter()
                    .enumerate()
                    .map(|(k, other)| {
                        &self.corner_jets[k][chart.mover(l, other.corner).boundary[c]]
                    })
                    .collect(),
            )
        })
    }

    /// `P_k h` for `k = 1` (symmetric), `2` (antisymmetric across cells) and `3` (skew).
    pub fn project(&self, chart: &LocalChart, k: usize) -> Result<Self> {
        let s = self.symmetrize(chart);
        match k {
            1 => Ok(s.rotate(chart)),
            2 => Ok(s.sub(&s.rotate(chart))),
            3 => Ok(self.sub(&s)),
            _ => Err(Error::Domain(format!("projection index {k} not in 1..=3"))),
        }
    }
}

/// Pointwise `P_k` of a function given on a symmetric vertex set of `U_m(x)`.
pub fn project_symmetry(
    chart: &LocalChart,
    values: &VertexFunction,
    k: usize,
) -> Result<VertexFunction> {
    if !(1..=3).contains(&k) {
        return Err(Error::Domain(format!("projection index {k} not in 1..=3")));
    }
    let get = |y: &VertexAddress| {
        values.get(y).cloned().ok_or_else(|| {
            Error::Domain(format!("value at {y} needed for the projection is missing"))
        })
    };
    let sym = |y: &VertexAddress| -> Result<Rational> {
        match chart.locate(y)? {
            None => get(y),
            Some((cell, rel)) => {
                let stab = chart.stabilizer(chart.cells[cell].corner);
                let d = Rational::from_integer(stab.len() as i64);
                let mut s = Rational::zero();
                for g in stab {
                    s += get(&chart.map_in_cell(g, &rel, cell)?)?;
                }
                Ok(s / d)
            }
        }
    };
    let rot_sym = |y: &VertexAddress| -> Result<Rational> {
        match chart.locate(y)? {
            None => get(y),
            Some((cell, rel)) => {
                let l = chart.cells[cell].corner;
                let d = Rational::from_integer(chart.cells.len() as i64);
                let mut s = Rational::zero();
                for (t, other) in chart.cells.iter().enumerate() {
                    s += sym(&chart.map_in_cell(chart.mover(l, other.corner), &rel, t)?)?;
                }
                Ok(s / d)
            }
        }
    };
    let mut out = VertexFunction::new(values.level);
    for (y, v) in values.iter() {
        let p = match k {
            1 => rot_sym(y)?,
            2 => sym(y)? - rot_sym(y)?,
            _ => v - &sym(y)?,
        };
        out.insert(y.clone(), p);
    }
    Ok(out)
}

/// The `h ∈ H_n(U(x))` agreeing with the samples on `∂U_{m+i}(x)`, `i = 0..=n`.
pub fn weak_tangent_fit(
    basis: &EasyBasis,
    chart: &LocalChart,
    n: usize,
    m: usize,
    samples: &VertexFunction,
) -> Result<LocalFunction> {
    chart.check_level(m)?;
    if n > basis.order() {
        return Err(Error::Config(format!(
            "easy basis of order {} too small for order {n}",
            basis.order()
        )));
    }
    let f = &chart.fractal;
    let n0 = f.n_boundary;
    let size = LocalFunction::unknowns(chart, n);
    let consts = &basis.constants;
    let w: Vec<Rational> = (0..=n)
        .map(|t| f.rho.pow((chart.level * t) as i32))
        .collect();
    let mut rows = Vec::with_capacity(size);
    let mut rhs = Vec::with_capacity(size);

    for i in 0..=n {
        let mut row = vec![Rational::zero(); size];
        for (cell, info) in chart.cells.iter().enumerate() {
            for t in 0..=n - i {
                for c in 0..n0 {
                    let coef = if c == info.corner {
                        &consts.a[t]
                    } else {
                        &consts.b[t]
                    };
                    row[LocalFunction::slot(chart, n, cell, c, i + t)] += &w[t] * coef;
                }
            }
        }
        rows.push(row);
        rhs.push(Rational::zero());
    }

    for (cell, info) in chart.cells.iter().enumerate() {
        let mut p = Matrix::zeros(n0 * (n + 1), size);
        for c in 0..n0 {
            for k in 0..=n {
                p[(c * (n + 1) + k, LocalFunction::slot(chart, n, cell, c, k))] = w[k].clone();
            }
        }
        let step = basis.child_for(f.fixing_map(info.corner), n);
        for depth in 0..=m + n - chart.level {
            if depth >= m - chart.level {
                for c in (0..n0).filter(|&c| c != info.corner) {
                    let y = chart.globalize(cell, &chart.ray_point(cell, depth, c));
                    let v = samples
                        .get(&y)
                        .ok_or_else(|| Error::Domain(format!("sample at {y} is missing")))?;
                    rows.push(p.row(c * (n + 1)).to_vec());
                    rhs.push(v.clone());
                }
            }
            p = step.mul(&p)?;
        }
    }

    let sol = Matrix::from_rows(rows)?.solve(&rhs).map_err(|e| {
        Error::Singular(format!(
            "weak-tangent system at {} (order {n}, level {m}): {e}",
            chart.center
        ))
    })?;
    Ok(LocalFunction::from_unknowns(chart, n, &sol))
}

/// The order-`n` weak tangent at `x` of `f ∈ H_{n+1}(U(x))`.
///
/// On each ray `F_w F_l^d q_c` the `k`-th projection of `f` is `Σ_{j ≤ n+1} C_j (s_k ρ^j)^d` with
/// `s = (1, r, λ)`; the tangent keeps the terms `j ≤ n`.
pub fn weak_tangent(
    basis: &EasyBasis,
    chart: &LocalChart,
    f: &dyn Fn(&VertexAddress) -> Result<Rational>,
    n: usize,
    base: usize,
) -> Result<LocalFunction> {
    let fr = &chart.fractal;
    let shells: Vec<Vec<(usize, usize, VertexAddress)>> = (0..=n + 1)
        .map(|i| chart.shell(base + i))
        .collect::<Result<_>>()?;
    let mut values = VertexFunction::new(base + n + 1);
    for (_, _, y) in shells.iter().flatten() {
        values.insert(y.clone(), f(y)?);
    }
    let mut tangent = VertexFunction::new(base + n);
    for (k, s) in [Rational::one(), fr.r.clone(), fr.lambda.clone()]
        .iter()
        .enumerate()
    {
        let part = project_symmetry(chart, &values, k + 1)?;
        let bases: Vec<Rational> = (0..=n + 1).map(|j| s * &fr.rho.pow(j as i32)).collect();
        let vander = Matrix::from_rows(
            (0..=n + 1)
                .map(|i| bases.iter().map(|b| b.pow(i as i32)).collect())
                .collect(),
        )?;
        for p in 0..shells[0].len() {
            let seq: Vec<Rational> = shells
                .iter()
                .map(|sh| part.value(&sh[p].2).cloned())
                .collect::<Result<_>>()?;
            let c = vander.solve(&seq)?;
            for (i, sh) in shells.iter().take(n + 1).enumerate() {
                let v: Rational = (0..=n).map(|j| &c[j] * &bases[j].pow(i as i32)).sum();
                let y = &sh[p].2;
                let old = tangent.get(y).cloned().unwrap_or_else(Rational::zero);
                tangent.insert(y.clone(), old + v);
            }
        }
    }
    weak_tangent_fit(basis, chart, n, base, &tangent)
}

/// `sup |f - h|` on `∂U_m(x)` and the sup of its skew parts `(f - h) - (f - h) ∘ g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TangentDefect {
    pub level: usize,
    pub boundary: Rational,
    pub skew: Rational,
}

pub fn weak_tangent_defect(
    basis: &EasyBasis,
    chart: &LocalChart,
    f: &dyn Fn(&VertexAddress) -> Result<Rational>,
    h: &LocalFunction,
    m: usize,
) -> Result<TangentDefect> {
    let diff = |y: &VertexAddress| -> Result<Rational> { Ok(f(y)? - h.value_at(basis, chart, y)?) };
    let mut boundary = Rational::zero();
    let mut skew = Rational::zero();
    for (cell, c, y) in chart.shell(m)? {
        let d = diff(&y)?;
        boundary = boundary.max_ref(&d.abs()).clone();
        let rel = chart.ray_point(cell, m - chart.level, c);
        for g in chart.reflections(chart.cells[cell].corner) {
            let gy = chart.map_in_cell(g, &rel, cell)?;
            skew = skew.max_ref(&(&d - &diff(&gy)?).abs()).clone();
        }
    }
    Ok(TangentDefect {
        level: m,
        boundary,
        skew,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    fn setup(name: &str, x: &str, n: usize) -> (FractalDescriptor, EasyBasis, LocalChart) {
        let f = FractalDescriptor::builtin(name).unwrap();
        let basis = EasyBasis::new(&f, n).unwrap();
        let chart = LocalChart::new(&f, &VertexAddress::parse(x, &f).unwrap()).unwrap();
        (f, basis, chart)
    }

    #[test]
    fn sg_junction_chart() {
        let (_, _, chart) = setup("sg", "0/1", 1);
        assert_eq!(chart.level, 1);
        assert_eq!(chart.cells.len(), 2);
        assert_eq!(chart.cells[0].word, vec![0]);
        assert_eq!(chart.cells[0].corner, 1);
        assert_eq!(chart.cells[1].corner, 0);
        assert_eq!(chart.shell(2).unwrap().len(), 4);
        assert_eq!(chart.reflections(0).len(), 1);
    }

    #[test]
    fn boundary_point_has_no_chart() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        assert!(LocalChart::new(&f, &VertexAddress::boundary(1)).is_err());
    }

    #[test]
    fn symmetric_monomial_outer_jets_are_scaled_alpha() {
        let (f, basis, chart) = setup("sg", "0/1", 3);
        let table = crate::monomial::build_monomial_table(&f, 3).unwrap();
        let p = LocalFunction::symmetric_monomial(&basis, &chart, 3, 2).unwrap();
        assert!(p
            .matching_residuals(&basis, &chart)
            .iter()
            .all(|r| r.is_zero()));
        let alpha = table.alpha.entries();
        let jet = &p.corner_jets[0][0];
        for i in 0..=2 {
            assert_eq!(jet[i], f.rho.pow(2 - i as i32) * &alpha[2 - i]);
        }
        assert!(jet[3].is_zero());
    }

    #[test]
    fn d4_reflections_are_two_transpositions() {
        let (_, _, chart) = setup("sg4", "0/1", 1);
        assert_eq!(chart.reflections(1).len(), 2);
        assert_eq!(chart.stabilizer(1).len(), 6);
        let _ = q(0, 1);
    }

    #[test]
    fn d4_stabilizer_average_equals_reflection_average() {
        let (f, basis, chart) = setup("sg4", "0/1", 2);
        let jets = (0..4)
            .map(|c| {
                Jet((0..3)
                    .map(|k| q((c * 3 + k) as i64 - 4, 1 + k as i64))
                    .collect())
            })
            .collect();
        let u = Multiharmonic::with_basis(&basis, jets).unwrap();
        let h = LocalFunction::restrict(&u, &chart);
        let values = h.sample(&basis, &chart, 1, 2).unwrap();
        let all = project_symmetry(&chart, &values, 3).unwrap();
        for (y, v) in values.iter() {
            let Some((cell, rel)) = chart.locate(y).unwrap() else {
                continue;
            };
            let l = chart.cells[cell].corner;
            let refl: Vec<&GroupElement> = chart
                .stabilizer(l)
                .into_iter()
                .filter(|g| (0..4).filter(|&c| g.boundary[c] == c).count() == 2)
                .collect();
            assert_eq!(refl.len(), 3);
            let mut s = Rational::zero();
            for g in refl {
                s += values
                    .get(&chart.map_in_cell(g, &rel, cell).unwrap())
                    .unwrap();
            }
            assert_eq!(all.get(y).unwrap(), &(v - &(s / q(3, 1))), "{y}");
        }
        let _ = f;
    }
}
