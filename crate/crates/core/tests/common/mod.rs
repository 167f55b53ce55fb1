//! Instance generators shared by the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::grid2d::{crossing_map, embed_homoclinic_xh, random_xh_window, required_margin, Pattern2D, Rect};

/// `X_V` window from an `X_H` window: transpose and relabel.
pub fn as_xv(xh: &Pattern2D) -> Pattern2D {
    xh.transpose().map_letters(|c| if c == b'H' { b'V' } else { c })
}

/// Homoclinic `X_H` window from a seed, moved to start at the origin.
fn homoclinic_xh(seed: u64) -> Pattern2D {
    let w = random_xh_window(seed, 8);
    let e = embed_homoclinic_xh(&w, required_margin(&w).unwrap()).unwrap();
    let b = e.bbox().unwrap();
    // keep y mod 4 so the frame stays in phase with the flat point
    e.translate(-b.x0, -b.y0 + b.y0.rem_euclid(4))
}

/// An `X_H` window, an `X_V` window on the same rectangle and a base
/// pattern over `letters` on their crossings, all derived from `seed`.
pub struct Instance {
    pub xh: Pattern2D,
    pub xv: Pattern2D,
    pub base: Pattern2D,
}

pub fn spacer2d_instance(seed: u64, letters: &[u8]) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = homoclinic_xh(rng.gen());
    let v = as_xv(&homoclinic_xh(rng.gen()));
    let (bh, bv) = (h.bbox().unwrap(), v.bbox().unwrap());
    let r = Rect { x0: bh.x0.max(bv.x0), y0: bh.y0.max(bv.y0), x1: bh.x1.min(bv.x1), y1: bh.y1.min(bv.y1) };
    let (xh, xv) = (h.restrict(&r), v.restrict(&r));
    let mut base = Pattern2D::new();
    for &(i, j) in crossing_map(&xh, &xv).unwrap().keys() {
        base.set(j, i, letters[rng.gen_range(0..letters.len())]);
    }
    Instance { xh, xv, base }
}
