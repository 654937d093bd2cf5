//! Images rendered from decoded syntax instead of samples: the CU partition
//! map and the intra mode map.
//!
//! Both draw each leaf's top and left edge as a 1-pixel black line, plus a
//! closing line along the right and bottom border of the picture. The
//! partition map is white elsewhere; the mode map fills each leaf with
//! `round(mode * 255 / 34)`.

use crate::types::{CTU_SIZE, MIN_CU_SIZE};
use crate::{CodingTree, CuLeaf, Error, Frame, Result};

pub const BACKGROUND: u8 = 255;
pub const LINE: u8 = 0;

pub fn mode_intensity(mode: u8) -> u8 {
    (mode as f64 * 255.0 / 34.0).round() as u8
}

pub fn render_partition_map(trees: &[CodingTree], width: u32, height: u32) -> Result<Frame> {
    render(trees, width, height, |_| BACKGROUND)
}

pub fn render_mode_map(trees: &[CodingTree], width: u32, height: u32) -> Result<Frame> {
    render(trees, width, height, |leaf| mode_intensity(leaf.mode.index()))
}

fn render(trees: &[CodingTree], width: u32, height: u32, fill: impl Fn(&CuLeaf) -> u8) -> Result<Frame> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!("map dimensions {width}x{height}")));
    }
    check_coverage(trees, width, height)?;
    let mut frame = Frame::filled(width, height, BACKGROUND);
    for tree in trees {
        tree.for_each_leaf(&mut |leaf| {
            let r = leaf.rect;
            if r.x >= width || r.y >= height {
                return;
            }
            let x_end = (r.x + r.size).min(width);
            let y_end = (r.y + r.size).min(height);
            let value = fill(leaf);
            for y in r.y..y_end {
                for x in r.x..x_end {
                    let v = if x == r.x || y == r.y { LINE } else { value };
                    frame.set(x, y, v);
                }
            }
        });
    }
    for y in 0..height {
        frame.set(width - 1, y, LINE);
    }
    for x in 0..width {
        frame.set(x, height - 1, LINE);
    }
    Ok(frame)
}

/// The trees must tile the CTU-padded picture exactly once.
fn check_coverage(trees: &[CodingTree], width: u32, height: u32) -> Result<()> {
    let pw = width.div_ceil(CTU_SIZE) * CTU_SIZE;
    let ph = height.div_ceil(CTU_SIZE) * CTU_SIZE;
    let uw = (pw / MIN_CU_SIZE) as usize;
    let mut covered = vec![false; uw * (ph / MIN_CU_SIZE) as usize];
    let mut problem = None;
    for tree in trees {
        tree.for_each_leaf(&mut |leaf| {
            let r = leaf.rect;
            if problem.is_some() {
                return;
            }
            if r.x % MIN_CU_SIZE != 0 || r.y % MIN_CU_SIZE != 0 || r.x + r.size > pw || r.y + r.size > ph {
                problem = Some(format!("leaf {r} outside the {pw}x{ph} picture"));
                return;
            }
            let n = (r.size / MIN_CU_SIZE) as usize;
            let (ux, uy) = ((r.x / MIN_CU_SIZE) as usize, (r.y / MIN_CU_SIZE) as usize);
            for y in uy..uy + n {
                for x in ux..ux + n {
                    if std::mem::replace(&mut covered[y * uw + x], true) {
                        problem = Some(format!("leaf {r} overlaps another leaf"));
                    }
                }
            }
        });
    }
    if let Some(p) = problem {
        return Err(Error::CoverageGap(p));
    }
    if let Some(i) = covered.iter().position(|&c| !c) {
        return Err(Error::CoverageGap(format!(
            "8x8 unit at ({}, {}) has no leaf",
            (i % uw) as u32 * MIN_CU_SIZE,
            (i / uw) as u32 * MIN_CU_SIZE
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256;
    use crate::transform::CoeffBlock;
    use crate::{CuRect, IntraMode};

    fn leaf(rect: CuRect, mode: u8) -> CodingTree {
        CodingTree::Leaf(CuLeaf {
            rect,
            mode: IntraMode::new(mode).unwrap(),
            coeffs: rect
                .transform_blocks()
                .iter()
                .map(|t| CoeffBlock::zeros(t.size as usize))
                .collect(),
        })
    }

    fn split(rect: CuRect, children: [CodingTree; 4]) -> CodingTree {
        CodingTree::Split {
            rect,
            children: Box::new(children),
        }
    }

    fn full(rect: CuRect) -> CodingTree {
        if rect.can_split() {
            split(rect, rect.quadrants().map(full))
        } else {
            leaf(rect, 0)
        }
    }

    fn line_pixels(f: &Frame) -> usize {
        f.samples().iter().filter(|&&v| v == LINE).count()
    }

    #[test]
    fn single_leaf_draws_border_only() {
        let f = render_partition_map(&[leaf(CuRect::new(0, 0, 64), 5)], 64, 64).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                let border = x == 0 || y == 0 || x == 63 || y == 63;
                assert_eq!(f.get(x, y) == LINE, border, "({x}, {y})");
            }
        }
    }

    #[test]
    fn full_split_draws_grid() {
        let f = render_partition_map(&[full(CuRect::new(0, 0, 64))], 64, 64).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                let on = x % 8 == 0 || y % 8 == 0 || x == 63 || y == 63;
                assert_eq!(f.get(x, y) == LINE, on, "({x}, {y})");
            }
        }
    }

    #[test]
    fn mode_fills() {
        assert_eq!(mode_intensity(0), 0);
        assert_eq!(mode_intensity(17), 128);
        assert_eq!(mode_intensity(34), 255);
        let root = CuRect::new(0, 0, 64);
        let q = root.quadrants();
        let tree = split(root, [leaf(q[0], 0), leaf(q[1], 17), leaf(q[2], 34), leaf(q[3], 26)]);
        let f = render_mode_map(&[tree], 64, 64).unwrap();
        assert_eq!(f.get(10, 10), 0);
        assert_eq!(f.get(40, 10), 128);
        assert_eq!(f.get(10, 40), 255);
        assert_eq!(f.get(40, 40), mode_intensity(26));
        assert_eq!(f.get(32, 10), LINE);
    }

    #[test]
    fn cropped_picture_keeps_closing_lines() {
        let trees = vec![leaf(CuRect::new(0, 0, 64), 34), leaf(CuRect::new(64, 0, 64), 34)];
        let f = render_mode_map(&trees, 100, 40).unwrap();
        assert_eq!((f.width(), f.height()), (100, 40));
        assert_eq!(f.get(99, 20), LINE);
        assert_eq!(f.get(50, 39), LINE);
        assert_eq!(f.get(64, 20), LINE);
        assert_eq!(f.get(80, 20), 255);
    }

    #[test]
    fn coverage_errors() {
        assert!(matches!(
            render_partition_map(&[leaf(CuRect::new(0, 0, 64), 0)], 100, 64),
            Err(Error::CoverageGap(_))
        ));
        let twice = vec![leaf(CuRect::new(0, 0, 64), 0), leaf(CuRect::new(0, 0, 64), 0)];
        assert!(matches!(render_partition_map(&twice, 64, 64), Err(Error::CoverageGap(_))));
        assert!(render_partition_map(&[leaf(CuRect::new(64, 0, 64), 0)], 64, 64).is_err());
    }

    fn random_tree(rng: &mut Xoshiro256, rect: CuRect) -> CodingTree {
        if rect.can_split() && rng.range(0, 2) == 0 {
            split(rect, rect.quadrants().map(|q| random_tree(rng, q)))
        } else {
            leaf(rect, rng.range(0, 35) as u8)
        }
    }

    /// Splits the first leaf (in z-order) that can still be split.
    fn split_one(tree: &CodingTree) -> Option<CodingTree> {
        match tree {
            CodingTree::Leaf(l) if l.rect.can_split() => {
                Some(split(l.rect, l.rect.quadrants().map(|q| leaf(q, l.mode.index()))))
            }
            CodingTree::Leaf(_) => None,
            CodingTree::Split { rect, children } => {
                for i in 0..4 {
                    if let Some(c) = split_one(&children[i]) {
                        let mut kids = children.clone();
                        kids[i] = c;
                        return Some(CodingTree::Split { rect: *rect, children: kids });
                    }
                }
                None
            }
        }
    }

    #[test]
    fn splitting_adds_line_pixels() {
        let mut rng = Xoshiro256::seed_from_u64(4);
        for _ in 0..200 {
            let tree = random_tree(&mut rng, CuRect::new(0, 0, 64));
            let Some(finer) = split_one(&tree) else { continue };
            let before = line_pixels(&render_partition_map(&[tree], 64, 64).unwrap());
            let after = line_pixels(&render_partition_map(&[finer], 64, 64).unwrap());
            assert!(after > before);
        }
    }
}
