//! RRT* over the UAV arena with oriented-rectangle obstacles.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::domain::ObstacleScene;
use crate::geometry::{OrientedRect, Polyline, Vec2};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub max_iterations: usize,
    /// Maximum edge length (m).
    pub step: f64,
    pub goal_bias: f64,
    pub neighbor_radius: f64,
    pub rng_seed: u64,
    /// Obstacles are grown by this margin before planning (m).
    #[serde(default)]
    pub inflation: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            max_iterations: 4000,
            step: 2.0,
            goal_bias: 0.1,
            neighbor_radius: 5.0,
            rng_seed: 0,
            inflation: 0.0,
        }
    }
}

impl PlannerParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_inflation(mut self, inflation: f64) -> Self {
        self.inflation = inflation;
        self
    }
}

struct Node {
    p: Vec2,
    parent: usize,
    cost: f64,
    children: Vec<usize>,
}

/// Uniform bucket grid for nearest and radius queries.
struct Buckets {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(min: Vec2, max: Vec2, cell: f64) -> Self {
        let nx = ((max.x - min.x) / cell).ceil().max(1.0) as usize;
        let ny = ((max.y - min.y) / cell).ceil().max(1.0) as usize;
        Self {
            origin: min,
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
        }
    }

    fn index(&self, p: Vec2) -> (usize, usize) {
        let i = ((p.x - self.origin.x) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64);
        let j = ((p.y - self.origin.y) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64);
        (i as usize, j as usize)
    }

    fn insert(&mut self, p: Vec2, id: usize) {
        let (i, j) = self.index(p);
        self.cells[j * self.nx + i].push(id);
    }

    fn ring(&self, ci: usize, cj: usize, r: usize, mut f: impl FnMut(usize)) {
        let (ci, cj, r) = (ci as isize, cj as isize, r as isize);
        for j in cj - r..=cj + r {
            for i in ci - r..=ci + r {
                if (i - ci).abs() != r && (j - cj).abs() != r {
                    continue;
                }
                if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
                    continue;
                }
                for &id in &self.cells[j as usize * self.nx + i as usize] {
                    f(id);
                }
            }
        }
    }

    fn nearest(&self, nodes: &[Node], p: Vec2) -> usize {
        let (ci, cj) = self.index(p);
        let mut best = (f64::INFINITY, usize::MAX);
        let max_r = self.nx.max(self.ny);
        for r in 0..=max_r {
            self.ring(ci, cj, r, |id| {
                let d = nodes[id].p.distance(p);
                if d < best.0 || (d == best.0 && id < best.1) {
                    best = (d, id);
                }
            });
            // Anything in ring r+1 or beyond is at least r*cell away.
            if best.1 != usize::MAX && best.0 <= r as f64 * self.cell {
                break;
            }
        }
        best.1
    }

    fn within(&self, nodes: &[Node], p: Vec2, radius: f64, out: &mut Vec<usize>) {
        out.clear();
        let (ci, cj) = self.index(p);
        let reach = (radius / self.cell).ceil() as usize;
        for r in 0..=reach {
            self.ring(ci, cj, r, |id| {
                if nodes[id].p.distance(p) <= radius {
                    out.push(id);
                }
            });
        }
        out.sort_unstable();
    }
}

struct World<'a> {
    rects: &'a [OrientedRect],
    inflation: f64,
    min: Vec2,
    max: Vec2,
}

impl World<'_> {
    fn point_free(&self, p: Vec2) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && self.rects.iter().all(|r| r.distance_to_point(p) > self.inflation)
    }

    fn edge_free(&self, a: Vec2, b: Vec2) -> bool {
        self.rects
            .iter()
            .all(|r| r.distance_to_segment(a, b) > self.inflation)
    }
}

/// Plan from the mission start to its goal. Returns `None` when no
/// collision-free path is found within the iteration budget.
///
/// The returned path is the cheapest tree path to the goal, shortened by a
/// greedy line-of-sight pass. Output is a pure function of the scene and
/// `params` (including the seed).
pub fn rrt_star(scene: &ObstacleScene, params: &PlannerParams) -> Option<Polyline> {
    let rects = scene.footprints();
    let world = World {
        rects: &rects,
        inflation: params.inflation,
        min: scene.arena.min,
        max: scene.arena.max,
    };
    let (start, goal) = (scene.mission.start, scene.mission.goal);
    if !world.point_free(start) || !world.point_free(goal) {
        return None;
    }
    if world.edge_free(start, goal) {
        return Some(Polyline::new(vec![start, goal]));
    }

    let mut rng = seed::rng(params.rng_seed);
    let mut nodes = vec![Node {
        p: start,
        parent: 0,
        cost: 0.0,
        children: Vec::new(),
    }];
    let mut grid = Buckets::new(world.min, world.max, params.neighbor_radius.max(params.step));
    grid.insert(start, 0);
    let mut goal_links: Vec<usize> = Vec::new();
    let mut near = Vec::new();

    for _ in 0..params.max_iterations {
        let sample = if rng.random::<f64>() < params.goal_bias {
            goal
        } else {
            Vec2::new(
                rng.random_range(world.min.x..=world.max.x),
                rng.random_range(world.min.y..=world.max.y),
            )
        };
        let nearest = grid.nearest(&nodes, sample);
        let from = nodes[nearest].p;
        let d = from.distance(sample);
        if d == 0.0 {
            continue;
        }
        let new = if d <= params.step {
            sample
        } else {
            from + (sample - from) * (params.step / d)
        };
        if !world.point_free(new) || !world.edge_free(from, new) {
            continue;
        }

        grid.within(&nodes, new, params.neighbor_radius, &mut near);
        let mut parent = nearest;
        let mut cost = nodes[nearest].cost + from.distance(new);
        for &n in &near {
            let c = nodes[n].cost + nodes[n].p.distance(new);
            if c < cost && n != nearest && world.edge_free(nodes[n].p, new) {
                parent = n;
                cost = c;
            }
        }
        let id = nodes.len();
        nodes.push(Node {
            p: new,
            parent,
            cost,
            children: Vec::new(),
        });
        nodes[parent].children.push(id);
        grid.insert(new, id);

        for &n in &near {
            if n == parent {
                continue;
            }
            let c = cost + new.distance(nodes[n].p);
            if c + 1e-12 < nodes[n].cost && world.edge_free(new, nodes[n].p) {
                let old = nodes[n].parent;
                nodes[old].children.retain(|&ch| ch != n);
                nodes[n].parent = id;
                nodes[id].children.push(n);
                let delta = nodes[n].cost - c;
                propagate(&mut nodes, n, delta);
            }
        }

        if new.distance(goal) <= params.step && world.edge_free(new, goal) {
            goal_links.push(id);
        }
    }

    let best = goal_links
        .iter()
        .map(|&i| (nodes[i].cost + nodes[i].p.distance(goal), i))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))?;
    let mut path = vec![goal];
    let mut cur = best.1;
    loop {
        path.push(nodes[cur].p);
        if cur == 0 {
            break;
        }
        cur = nodes[cur].parent;
    }
    path.reverse();
    Some(shortcut(&world, path))
}

fn propagate(nodes: &mut [Node], root: usize, delta: f64) {
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        nodes[n].cost -= delta;
        stack.extend_from_slice(&nodes[n].children);
    }
}

/// Greedy line-of-sight shortening: from each kept vertex jump to the
/// farthest later vertex that is directly visible.
fn shortcut(world: &World<'_>, path: Vec<Vec2>) -> Polyline {
    let mut out = vec![path[0]];
    let mut i = 0;
    while i < path.len() - 1 {
        let mut j = path.len() - 1;
        while j > i + 1 && !world.edge_free(path[i], path[j]) {
            j -= 1;
        }
        out.push(path[j]);
        i = j;
    }
    Polyline::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Obstacle;
    use crate::geometry::corridor_reachable;

    fn obstacle(cx: f64, cy: f64, l: f64, w: f64, r: f64) -> Obstacle {
        Obstacle {
            cx,
            cy,
            length: l,
            width: w,
            height: 20.0,
            rotation: r,
        }
    }

    #[test]
    fn empty_scene_is_straight() {
        let s = ObstacleScene::new(vec![]);
        let p = rrt_star(&s, &PlannerParams::default()).unwrap();
        assert!((p.length() - 50.0).abs() < 0.05 * 50.0);
    }

    #[test]
    fn centered_obstacle_forces_detour() {
        let s = ObstacleScene::new(vec![obstacle(0.0, 25.0, 10.0, 4.0, 0.0)]);
        let p = rrt_star(&s, &PlannerParams::default().with_seed(3)).unwrap();
        assert!(p.length() >= 50.0);
        let r = s.obstacles[0].footprint();
        for v in &p.points {
            assert!(!r.contains(*v));
        }
        for (a, b) in p.segments() {
            assert!(r.distance_to_segment(a, b) > 0.0);
        }
    }

    #[test]
    fn blocked_corridor_has_no_path() {
        let s = ObstacleScene::new(vec![
            obstacle(-31.0, 25.0, 20.0, 20.0, 45.0),
            obstacle(-3.0, 25.0, 20.0, 20.0, 45.0),
            obstacle(25.0, 25.0, 20.0, 20.0, 45.0),
        ]);
        assert!(!corridor_reachable(&s, 0.0, 0.5));
        assert!(rrt_star(&s, &PlannerParams::default()).is_none());
    }

    #[test]
    fn same_seed_same_path() {
        let s = ObstacleScene::new(vec![
            obstacle(2.0, 20.0, 12.0, 3.0, 20.0),
            obstacle(-8.0, 35.0, 6.0, 6.0, 70.0),
        ]);
        let p = PlannerParams::default().with_seed(99);
        assert_eq!(rrt_star(&s, &p), rrt_star(&s, &p));
    }

    #[test]
    fn inflated_planning_keeps_margin() {
        let s = ObstacleScene::new(vec![obstacle(1.0, 25.0, 8.0, 8.0, 30.0)]);
        let p = rrt_star(&s, &PlannerParams::default().with_inflation(1.0)).unwrap();
        let r = s.obstacles[0].footprint();
        for (a, b) in p.segments() {
            assert!(r.distance_to_segment(a, b) > 1.0);
        }
    }
}
