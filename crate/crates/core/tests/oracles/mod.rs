//! Independent reference computations shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

/// Specular point on an exact sphere of radius `a`, found by minimising the
/// reflected path length. Returns the arc distance from the transmitter foot.
///
/// Tx sits at polar angle 0, Rx at `theta = d / a`, the reflection point at
/// angle `phi`. Path-length differences between neighbouring candidates are
/// formed without cancellation from `|A|^2 - |B|^2 = (A - B).(A + B)`, so a
/// 1 mm grid remains resolvable on a kilometre-scale path.
pub struct SphereLink {
    pub a: f64,
    pub ht: f64,
    pub hr: f64,
    pub d: f64,
}

impl SphereLink {
    fn theta(&self) -> f64 {
        self.d / self.a
    }

    fn point(&self, phi: f64) -> (f64, f64) {
        (self.a * phi.sin(), self.a * phi.cos())
    }

    fn tx(&self) -> (f64, f64) {
        (0.0, self.a + self.ht)
    }

    fn rx(&self) -> (f64, f64) {
        let t = self.theta();
        ((self.a + self.hr) * t.sin(), (self.a + self.hr) * t.cos())
    }

    fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
        (p.0 - q.0).hypot(p.1 - q.1)
    }

    /// L(phi1) - L(phi0) for the path Tx -> P(phi) -> Rx.
    pub fn path_change(&self, phi0: f64, phi1: f64) -> f64 {
        let a = self.a;
        let half = 0.5 * (phi1 - phi0);
        let mid = 0.5 * (phi1 + phi0);
        // P1 - P0 = 2a sin(half) (cos mid, -sin mid)
        let chord = 2.0 * a * half.sin();
        let step = (chord * mid.cos(), -chord * mid.sin());
        let p0 = self.point(phi0);
        let p1 = self.point(phi1);
        let mut total = 0.0;
        for s in [self.tx(), self.rx()] {
            // |S - P1|^2 - |S - P0|^2 = -2 S.(P1 - P0), as |P1| = |P0| = a
            let sq = -2.0 * (s.0 * step.0 + s.1 * step.1);
            total += sq / (Self::dist(s, p1) + Self::dist(s, p0));
        }
        total
    }

    /// Arc position of the path-length minimum, to within half a millimetre.
    pub fn specular_arc(&self) -> f64 {
        let h = 1e-3 / self.a;
        let rising = |phi: f64| self.path_change(phi, phi + h) > 0.0;
        let (mut lo, mut hi) = (h, self.theta() - 2.0 * h);
        assert!(!rising(lo) && rising(hi), "no interior minimum");
        while (hi - lo) * self.a > 0.5 {
            let mid = 0.5 * (lo + hi);
            if rising(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // Scan a 1 mm grid across the bracket and keep the lowest point.
        let start = lo - 1.0 / self.a;
        let mut best = (start, 0.0);
        let mut acc = 0.0;
        for i in 1..=3_000 {
            let phi = start + i as f64 * h;
            acc += self.path_change(phi - h, phi);
            if acc < best.1 {
                best = (phi, acc);
            }
        }
        best.0 * self.a
    }

    /// Grazing angle and tangent-plane distances at an arc position, by
    /// exact trigonometry.
    pub fn local_geometry(&self, arc: f64) -> (f64, f64, f64) {
        let phi = arc / self.a;
        let p = self.point(phi);
        let normal = (phi.sin(), phi.cos());
        let tangent = (phi.cos(), -phi.sin());
        let t = self.tx();
        let r = self.rx();
        let to_t = (t.0 - p.0, t.1 - p.1);
        let to_r = (r.0 - p.0, r.1 - p.1);
        let x = -(to_t.0 * tangent.0 + to_t.1 * tangent.1);
        let x_prime = to_r.0 * tangent.0 + to_r.1 * tangent.1;
        let ht_p = to_t.0 * normal.0 + to_t.1 * normal.1;
        (ht_p.atan2(x), x, x_prime)
    }
}
