use std::collections::HashMap;

/// Uniform-grid bucket index over planar points.
pub(crate) struct GridIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl GridIndex {
    pub fn new(cell: f64) -> Self {
        Self {
            cell,
            buckets: HashMap::new(),
        }
    }

    pub fn from_points(coords: &[f64], cell: f64) -> Self {
        let mut index = Self::new(cell);
        for (i, p) in coords.chunks_exact(2).enumerate() {
            index.insert(i, p);
        }
        index
    }

    fn key(&self, p: &[f64]) -> (i64, i64) {
        (
            (p[0] / self.cell).floor() as i64,
            (p[1] / self.cell).floor() as i64,
        )
    }

    pub fn insert(&mut self, id: usize, p: &[f64]) {
        let key = self.key(p);
        self.buckets.entry(key).or_default().push(id);
    }

    /// Calls `visit` with every stored id whose bucket intersects the square
    /// of half-width `radius` around `p`.
    pub fn for_each_near<F: FnMut(usize)>(&self, p: &[f64], radius: f64, mut visit: F) {
        let reach = (radius / self.cell).ceil() as i64;
        let (cx, cy) = self.key(p);
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                if let Some(ids) = self.buckets.get(&(cx + dx, cy + dy)) {
                    ids.iter().copied().for_each(&mut visit);
                }
            }
        }
    }
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
