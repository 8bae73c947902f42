use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fractal::address::VertexAddress;
use crate::fractal::symmetry::{GroupElement, SymmetryGroup};
use crate::rational::Rational;

/// Raw descriptor file layout.
#[derive(Debug, Deserialize)]
struct DescriptorFile {
    name: String,
    title: Option<String>,
    maps: usize,
    boundary: usize,
    r: Rational,
    mu: Rational,
    lambda: Rational,
    fixed_points: Vec<[usize; 2]>,
    identifications: Vec<Vec<[usize; 2]>>,
    skew: Vec<usize>,
    #[serde(default)]
    edge_lines: Vec<[usize; 5]>,
    symmetry: Vec<GeneratorFile>,
    relations: RelationsFile,
    #[serde(default)]
    auxiliary: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    layout: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct GeneratorFile {
    name: String,
    boundary: Vec<usize>,
    maps: Vec<usize>,
    corners: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RelationsFile {
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
}

/// Named symmetry generator as read from a descriptor.
#[derive(Clone, Debug)]
pub struct SymmetryGenerator {
    pub name: String,
    pub element: GroupElement,
}

/// Combinatorial self-similar structure plus its harmonic constants.
#[derive(Clone, Debug)]
pub struct FractalDescriptor {
    pub name: String,
    pub title: String,
    /// number of contractions
    pub n_maps: usize,
    /// number of boundary vertices
    pub n_boundary: usize,
    pub r: Rational,
    pub mu: Rational,
    pub rho: Rational,
    pub lambda: Rational,
    /// `fixed_point[l] = Some(c)` when `F_l q_c = q_c`
    pub fixed_point: Vec<Option<usize>>,
    /// level-1 gluing classes of `(map, corner)`
    pub identifications: Vec<Vec<(usize, usize)>>,
    pub generators: Vec<SymmetryGenerator>,
    /// boundary permutation of the reflection fixing `q_0` used for the skew family
    pub skew: Vec<usize>,
    /// `(map, a, b) -> (a', b')` when the cell edge `F_map q_a F_map q_b` lies on the edge `q_a' q_b'`
    pub edge_lines: BTreeMap<(usize, usize, usize), (usize, usize)>,
    pub relations: RelationsFile,
    /// displayed elimination systems keyed by family index 1..=3
    pub auxiliary: BTreeMap<usize, Vec<String>>,
    /// auxiliary name -> representative level-1 vertex
    pub layout: BTreeMap<String, VertexAddress>,
    class_min: Vec<Vec<(usize, usize)>>,
    group: SymmetryGroup,
}

const BUILTIN: [(&str, &str); 4] = [
    ("sg", include_str!("../../data/fractals/sg.toml")),
    ("sg3", include_str!("../../data/fractals/sg3.toml")),
    ("hg", include_str!("../../data/fractals/hg.toml")),
    ("sg4", include_str!("../../data/fractals/sg4.toml")),
];

impl FractalDescriptor {
    /// Names of the shipped descriptors.
    pub fn builtin_names() -> Vec<&'static str> {
        BUILTIN.iter().map(|(n, _)| *n).collect()
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let key = name.to_ascii_lowercase();
        let key = match key.as_str() {
            "sg_3" | "sg-3" => "sg3",
            "sg^4" | "sg-4" | "sg_4" => "sg4",
            "hexagasket" => "hg",
            other => other,
        };
        BUILTIN
            .iter()
            .find(|(n, _)| *n == key)
            .map(|(_, text)| Self::from_toml(text))
            .unwrap_or_else(|| Err(Error::Config(format!("unknown fractal {name:?}"))))
    }

    pub fn all_builtin() -> Result<Vec<Self>> {
        BUILTIN.iter().map(|(_, t)| Self::from_toml(t)).collect()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: DescriptorFile =
            toml::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: DescriptorFile) -> Result<Self> {
        let n = raw.maps;
        let n0 = raw.boundary;
        if !(2..=10).contains(&n) {
            return Err(Error::Descriptor(format!(
                "{}: map count {n} outside 2..=10",
                raw.name
            )));
        }
        if n0 != 3 && n0 != 4 {
            return Err(Error::Descriptor(format!(
                "{}: boundary size must be 3 or 4",
                raw.name
            )));
        }
        let mut fixed_point = vec![None; n];
        for &[l, c] in &raw.fixed_points {
            if l >= n || c >= n0 {
                return Err(Error::Descriptor(format!(
                    "fixed point ({l},{c}) out of range"
                )));
            }
            fixed_point[l] = Some(c);
        }
        for c in 0..n0 {
            if fixed_point.iter().filter(|f| **f == Some(c)).count() != 1 {
                return Err(Error::Descriptor(format!(
                    "boundary vertex {c} needs exactly one fixing map"
                )));
            }
        }
        let mut identifications = Vec::new();
        let mut seen = vec![vec![false; n0]; n];
        for class in &raw.identifications {
            if class.len() < 2 {
                return Err(Error::Descriptor(
                    "identification class with fewer than two members".into(),
                ));
            }
            let mut members = Vec::new();
            for &[m, c] in class {
                if m >= n || c >= n0 {
                    return Err(Error::Descriptor(format!(
                        "identification ({m},{c}) out of range"
                    )));
                }
                if seen[m][c] {
                    return Err(Error::Descriptor(format!(
                        "({m},{c}) appears in two identification classes"
                    )));
                }
                if fixed_point[m] == Some(c) {
                    return Err(Error::Descriptor(format!(
                        "boundary point ({m},{c}) cannot be glued"
                    )));
                }
                seen[m][c] = true;
                members.push((m, c));
            }
            members.sort();
            identifications.push(members);
        }
        let mut class_min = vec![vec![(0, 0); n0]; n];
        for (m, row) in class_min.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = (m, c);
            }
        }
        for class in &identifications {
            let least = class[0];
            for &(m, c) in class {
                class_min[m][c] = least;
            }
        }
        let r = raw.r;
        let mu = raw.mu;
        let rho = &r * &mu;
        let generators: Vec<SymmetryGenerator> = raw
            .symmetry
            .into_iter()
            .map(|g| {
                Ok(SymmetryGenerator {
                    name: g.name,
                    element: GroupElement::new(g.boundary, g.maps, g.corners, n, n0)?,
                })
            })
            .collect::<Result<_>>()?;
        let mut auxiliary = BTreeMap::new();
        for (k, eqs) in raw.auxiliary {
            let idx: usize = k
                .trim_start_matches('k')
                .parse()
                .map_err(|_| Error::Descriptor(format!("bad auxiliary key {k:?}")))?;
            if !(1..=3).contains(&idx) {
                return Err(Error::Descriptor(format!(
                    "auxiliary family {idx} outside 1..=3"
                )));
            }
            auxiliary.insert(idx, eqs);
        }
        let mut edge_lines = BTreeMap::new();
        for &[m, a, b, pa, pb] in &raw.edge_lines {
            if m >= n || a >= n0 || b >= n0 || pa >= n0 || pb >= n0 || a == b || pa == pb {
                return Err(Error::Descriptor(format!(
                    "edge line {:?} out of range",
                    [m, a, b, pa, pb]
                )));
            }
            edge_lines.insert((m, a, b), (pa, pb));
            edge_lines.insert((m, b, a), (pb, pa));
        }
        let mut desc = FractalDescriptor {
            name: raw.name.clone(),
            title: raw.title.unwrap_or(raw.name),
            n_maps: n,
            n_boundary: n0,
            r,
            mu,
            rho,
            lambda: raw.lambda,
            fixed_point,
            identifications,
            generators,
            skew: raw.skew,
            edge_lines,
            relations: raw.relations,
            auxiliary,
            layout: BTreeMap::new(),
            class_min,
            group: SymmetryGroup::trivial(n, n0),
        };
        for (name, addr) in raw.layout {
            let a = VertexAddress::parse(&addr, &desc)?;
            desc.layout.insert(name, a);
        }
        desc.validate_generators()?;
        let gens: Vec<GroupElement> = desc.generators.iter().map(|g| g.element.clone()).collect();
        desc.group = SymmetryGroup::generate(&gens, n, n0)?;
        if desc.group.find(&desc.skew).is_none() {
            return Err(Error::Descriptor(
                "skew reflection is not a group element".into(),
            ));
        }
        if desc.skew[0] != 0 {
            return Err(Error::Descriptor("skew reflection must fix q_0".into()));
        }
        Ok(desc)
    }

    /// Each generator must respect gluing and fixed points.
    fn validate_generators(&self) -> Result<()> {
        for g in &self.generators {
            let e = &g.element;
            for l in 0..self.n_maps {
                if let Some(c) = self.fixed_point[l] {
                    let img = e.boundary[c];
                    if e.maps[l] != self.fixing_map(img) || e.corners[l][c] != img {
                        return Err(Error::Descriptor(format!(
                            "generator {} does not send F_{l} q_{c} to q_{img}",
                            g.name
                        )));
                    }
                }
            }
            for class in &self.identifications {
                let images: Vec<(usize, usize)> = class
                    .iter()
                    .map(|&(m, c)| self.class_min[e.maps[m]][e.corners[m][c]])
                    .collect();
                if images.iter().any(|x| *x != images[0]) {
                    return Err(Error::Descriptor(format!(
                        "generator {} breaks identification {class:?}",
                        g.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Map index `l` with `F_l q_c = q_c`.
    pub fn fixing_map(&self, c: usize) -> usize {
        self.fixed_point
            .iter()
            .position(|f| *f == Some(c))
            .expect("validated")
    }

    /// Least `(map, corner)` glued to the given pair.
    pub fn class_representative(&self, map: usize, corner: usize) -> (usize, usize) {
        self.class_min[map][corner]
    }

    /// Largest ancestor edge containing the edge `a b` of cell `word`, as `(prefix, a', b')` with `a' < b'`.
    pub fn ancestor_edge(&self, word: &[usize], a: usize, b: usize) -> (Vec<usize>, usize, usize) {
        let mut w = word.to_vec();
        let (mut a, mut b) = (a, b);
        while let Some(&l) = w.last() {
            match self.edge_lines.get(&(l, a, b)) {
                Some(&(pa, pb)) => {
                    w.pop();
                    a = pa;
                    b = pb;
                }
                None => break,
            }
        }
        (w, a.min(b), a.max(b))
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    /// Number of distinct level-1 vertices minus the boundary.
    pub fn interior_count_level1(&self) -> usize {
        let mut reps = std::collections::BTreeSet::new();
        for m in 0..self.n_maps {
            for c in 0..self.n_boundary {
                if self.fixed_point[m] == Some(c) {
                    continue;
                }
                reps.insert(self.class_min[m][c]);
            }
        }
        reps.len()
    }

    /// The tent-function integral weight `mu^m / N0` per containing cell.
    pub fn tent_weight(&self, m: usize) -> Rational {
        self.mu.pow(m as i32) / Rational::from_integer(self.n_boundary as i64)
    }

    /// `a_0`-style level-0 normal derivative weight `N0 - 1`.
    pub fn degree0(&self) -> Rational {
        Rational::from_integer(self.n_boundary as i64 - 1)
    }

    /// `alpha_1 = 1/((N0-1) N0)`.
    pub fn alpha1(&self) -> Rational {
        Rational::new(1, ((self.n_boundary - 1) * self.n_boundary) as i64)
    }

    /// `beta_0 = -1/(N0-1)`.
    pub fn beta0(&self) -> Rational {
        Rational::new(-1, self.n_boundary as i64 - 1)
    }

    /// `gamma_0`: 1/2 on D3, 1/3 on D4.
    pub fn gamma0(&self) -> Rational {
        if self.n_boundary == 3 {
            Rational::new(1, 2)
        } else {
            Rational::new(1, 3)
        }
    }

    /// Transverse stencils at `q_l`: weights on `q_{l+1}, ..., q_{l+N0-1}`.
    pub fn transverse_stencils(&self) -> Vec<Vec<Rational>> {
        let one = Rational::one();
        let two = Rational::from_integer(2);
        if self.n_boundary == 3 {
            vec![vec![one.clone(), -one]]
        } else {
            vec![
                vec![two.clone(), -one.clone(), -one.clone()],
                vec![-one.clone(), two, -one],
            ]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load_with_expected_constants() {
        let sg = FractalDescriptor::builtin("sg").unwrap();
        assert_eq!(sg.rho, Rational::new(1, 5));
        assert_eq!(sg.rho, sg.lambda);
        let sg3 = FractalDescriptor::builtin("sg3").unwrap();
        assert_eq!(sg3.rho, Rational::new(7, 90));
        let hg = FractalDescriptor::builtin("hg").unwrap();
        assert_eq!(hg.rho, Rational::new(1, 14));
        let sg4 = FractalDescriptor::builtin("sg4").unwrap();
        assert_eq!(sg4.rho, Rational::new(1, 6));
    }

    #[test]
    fn interior_counts() {
        let counts: Vec<usize> = ["sg", "sg3", "hg", "sg4"]
            .iter()
            .map(|n| {
                FractalDescriptor::builtin(n)
                    .unwrap()
                    .interior_count_level1()
            })
            .collect();
        assert_eq!(counts, vec![3, 7, 9, 6]);
    }

    #[test]
    fn group_orders() {
        let orders: Vec<usize> = ["sg", "sg3", "hg", "sg4"]
            .iter()
            .map(|n| FractalDescriptor::builtin(n).unwrap().group().len())
            .collect();
        assert_eq!(orders, vec![6, 6, 6, 24]);
    }

    #[test]
    fn broken_generator_rejected() {
        let text = include_str!("../../data/fractals/hg.toml")
            .replace("maps = [1, 2, 0, 5, 3, 4]", "maps = [1, 2, 0, 3, 4, 5]");
        assert!(matches!(
            FractalDescriptor::from_toml(&text),
            Err(Error::Descriptor(_))
        ));
    }

    #[test]
    fn unknown_name_is_config_error() {
        assert!(matches!(
            FractalDescriptor::builtin("vicsek"),
            Err(Error::Config(_))
        ));
    }
}
