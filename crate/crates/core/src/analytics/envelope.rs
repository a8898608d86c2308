/// Lower convex envelope of a finite point set, evaluated by linear
/// interpolation between hull vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerEnvelope {
    vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl LowerEnvelope {
    /// Monotone-chain lower hull. Points need not be sorted; for repeated
    /// abscissae only the lowest ordinate is kept.
    pub fn new(points: &[(f64, f64)]) -> Self {
        assert!(!points.is_empty(), "envelope of an empty point set");
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts.dedup_by(|b, a| a.0 == b.0);

        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        Self { vertices: hull }
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Envelope value at `x`; constant beyond the outermost vertices.
    pub fn eval(&self, x: f64) -> f64 {
        let v = &self.vertices;
        if x <= v[0].0 {
            return v[0].1;
        }
        if x >= v[v.len() - 1].0 {
            return v[v.len() - 1].1;
        }
        let i = v.partition_point(|p| p.0 <= x);
        let (a, b) = (v[i - 1], v[i]);
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    }
}
