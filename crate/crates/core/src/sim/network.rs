use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{rng_for, stream, Geometry, NetworkConfig, SimError};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Wban {
    pub coordinator: Point,
    /// Global sensor ids, contiguous.
    pub sensors: Vec<usize>,
}

/// Coexisting networks plus the cross-network interference graph.
///
/// Sensor `i` of network `w` has global id `w * L + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    wbans: Vec<Wban>,
    owner: Vec<usize>,
    positions: Vec<Point>,
    adjacency: Vec<Vec<usize>>,
}

impl Network {
    /// Disk-rule network from explicit positions. `sensors[w]` lists the
    /// sensors of network `w`.
    pub fn from_layout(coordinators: &[Point], sensors: &[Vec<Point>], interference_radius: f64) -> Result<Self, SimError> {
        if coordinators.len() != sensors.len() {
            return Err(SimError::Config(format!("{} coordinators but {} sensor lists", coordinators.len(), sensors.len())));
        }
        let mut net = Network::empty(coordinators, sensors.iter().map(Vec::len));
        net.positions = sensors.iter().flatten().copied().collect();
        let inside: Vec<Vec<bool>> = net
            .positions
            .iter()
            .map(|p| coordinators.iter().map(|c| p.distance(*c) <= interference_radius).collect())
            .collect();
        let n = net.positions.len();
        for s in 0..n {
            for t in s + 1..n {
                let (a, b) = (net.owner[s], net.owner[t]);
                if a != b && inside[s][a] && inside[s][b] && inside[t][a] && inside[t][b] {
                    net.adjacency[s].push(t);
                    net.adjacency[t].push(s);
                }
            }
        }
        Ok(net)
    }

    fn empty(coordinators: &[Point], sizes: impl Iterator<Item = usize>) -> Self {
        let mut wbans = Vec::with_capacity(coordinators.len());
        let mut owner = Vec::new();
        for (w, (c, len)) in coordinators.iter().zip(sizes).enumerate() {
            let start = owner.len();
            owner.extend(std::iter::repeat_n(w, len));
            wbans.push(Wban { coordinator: *c, sensors: (start..start + len).collect() });
        }
        let n = owner.len();
        Network { wbans, owner, positions: vec![Point::default(); n], adjacency: vec![Vec::new(); n] }
    }

    pub fn wbans(&self) -> &[Wban] {
        &self.wbans
    }

    pub fn n_wbans(&self) -> usize {
        self.wbans.len()
    }

    pub fn n_sensors(&self) -> usize {
        self.owner.len()
    }

    pub fn wban_of(&self, sensor: usize) -> usize {
        self.owner[sensor]
    }

    pub fn position(&self, sensor: usize) -> Point {
        self.positions[sensor]
    }

    /// Sorted neighbour ids.
    pub fn neighbors(&self, sensor: usize) -> &[usize] {
        &self.adjacency[sensor]
    }

    pub fn degree(&self, sensor: usize) -> usize {
        self.adjacency[sensor].len()
    }

    pub fn are_interfering(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Each undirected edge once, as `(low, high)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(s, ns)| ns.iter().filter(move |&&t| t > s).map(move |&t| (s, t)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Drops every interference edge.
    pub fn isolate(&mut self) {
        self.adjacency.iter_mut().for_each(Vec::clear);
    }
}

pub fn build_network(cfg: &NetworkConfig) -> Result<Network, SimError> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, stream::NETWORK);
    match cfg.geometry {
        Geometry::Disk { area_side, interference_radius, body_radius } => {
            let coordinators: Vec<Point> = (0..cfg.n_wbans)
                .map(|_| Point::new(rng.random::<f64>() * area_side, rng.random::<f64>() * area_side))
                .collect();
            let sensors: Vec<Vec<Point>> = coordinators
                .iter()
                .map(|c| (0..cfg.sensors_per_wban).map(|_| point_in_disk(&mut rng, *c, body_radius)).collect())
                .collect();
            Network::from_layout(&coordinators, &sensors, interference_radius)
        }
        Geometry::AbstractQ { neighbors } => regular_network(cfg, neighbors, &mut rng),
    }
}

fn point_in_disk(rng: &mut impl Rng, centre: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Point::new(centre.x + r * theta.cos(), centre.y + r * theta.sin())
}

/// Random `q`-regular graph whose edges all cross network boundaries.
///
/// Sensors are laid on a ring so that ring position `k` belongs to network
/// `k mod N`; a circulant graph then uses only offsets that are not multiples
/// of `N`. Odd degrees add a perfect matching, either the antipodal offset or
/// the pairing `2t <-> 2t+1`. Networks and sensors are randomly relabelled
/// afterwards.
fn regular_network(cfg: &NetworkConfig, q: usize, rng: &mut impl Rng) -> Result<Network, SimError> {
    let (nw, l) = (cfg.n_wbans, cfg.sensors_per_wban);
    let n = nw * l;
    let available = n - l;
    if q > available {
        return Err(SimError::TooManyNeighbors { requested: q, available });
    }
    let no_graph = SimError::NoRegularGraph { degree: q, sensors: n };
    let valid = |d: usize| !d.is_multiple_of(nw);
    let mut offsets: Vec<usize> = (1..n.div_ceil(2)).filter(|&d| valid(d)).collect();
    let antipodal = n % 2 == 0 && valid(n / 2);
    let mut pairing = false;
    let mut half = false;
    if q % 2 == 1 {
        if n % 2 == 1 {
            return Err(no_graph);
        }
        if antipodal {
            half = true;
        } else {
            pairing = true;
            offsets.retain(|&d| d != 1);
        }
    }
    let k = q / 2;
    if k > offsets.len() {
        return Err(no_graph);
    }
    let chosen: Vec<usize> = sample(rng, offsets.len(), k).into_iter().map(|i| offsets[i]).collect();

    let mut wban_perm: Vec<usize> = (0..nw).collect();
    wban_perm.shuffle(rng);
    let sensor_perm: Vec<Vec<usize>> = (0..nw)
        .map(|_| {
            let mut p: Vec<usize> = (0..l).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let label = |pos: usize| {
        let w = wban_perm[pos % nw];
        w * l + sensor_perm[w][pos / nw]
    };

    let mut net = Network::empty(&vec![Point::default(); nw], std::iter::repeat_n(l, nw));
    let mut link = |a: usize, b: usize| {
        let (x, y) = (label(a), label(b));
        net.adjacency[x].push(y);
        net.adjacency[y].push(x);
    };
    for pos in 0..n {
        for &d in &chosen {
            link(pos, (pos + d) % n);
        }
        if half && pos < n / 2 {
            link(pos, pos + n / 2);
        }
        if pairing && pos % 2 == 0 {
            link(pos, pos + 1);
        }
    }
    for ns in &mut net.adjacency {
        ns.sort_unstable();
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abstract_cfg(n: usize, l: usize, q: usize, seed: u64) -> NetworkConfig {
        let mut c = NetworkConfig::new(n, l);
        c.geometry = Geometry::AbstractQ { neighbors: q };
        c.seed = seed;
        c
    }

    fn assert_simple_cross(net: &Network) {
        for s in 0..net.n_sensors() {
            let ns = net.neighbors(s);
            assert!(ns.windows(2).all(|w| w[0] < w[1]), "duplicate edge at {s}");
            for &t in ns {
                assert_ne!(net.wban_of(s), net.wban_of(t));
                assert!(net.are_interfering(t, s));
            }
        }
    }

    #[test]
    fn single_network_has_no_edges() {
        let mut c = NetworkConfig::new(1, 12);
        c.geometry = Geometry::Disk { area_side: 0.0, interference_radius: 3.0, body_radius: 1.0 };
        assert_eq!(build_network(&c).unwrap().edge_count(), 0);
        assert_eq!(build_network(&abstract_cfg(1, 12, 0, 1)).unwrap().edge_count(), 0);
    }

    #[test]
    fn regular_degree() {
        for (n, l, q) in [(10, 12, 5), (10, 12, 6), (4, 3, 9), (3, 4, 8), (2, 2, 2), (2, 2, 1), (5, 2, 3), (30, 12, 20)] {
            for seed in 0..4 {
                let net = build_network(&abstract_cfg(n, l, q, seed)).unwrap();
                assert_simple_cross(&net);
                assert!((0..net.n_sensors()).all(|s| net.degree(s) == q), "n={n} l={l} q={q}");
            }
        }
    }

    #[test]
    fn regular_rejects_impossible() {
        assert!(matches!(build_network(&abstract_cfg(3, 4, 9, 0)), Err(SimError::TooManyNeighbors { .. })));
        assert!(matches!(build_network(&abstract_cfg(3, 3, 1, 0)), Err(SimError::NoRegularGraph { .. })));
    }

    #[test]
    fn disk_rule_needs_both_sensors_in_both_ranges() {
        let coords = [Point::new(0.0, 0.0), Point::new(4.0, 0.0)];
        let sensors = vec![
            vec![Point::new(2.0, 0.0), Point::new(-1.0, 0.0)],
            vec![Point::new(2.5, 0.0), Point::new(1.5, 0.5)],
        ];
        let net = Network::from_layout(&coords, &sensors, 3.0).unwrap();
        assert!(net.are_interfering(0, 2));
        assert!(net.are_interfering(0, 3));
        assert!(!net.are_interfering(1, 2));
        assert_eq!(net.edge_count(), 2);
        assert_simple_cross(&net);
    }

    #[test]
    fn disk_network_deterministic() {
        let c = NetworkConfig::new(8, 12);
        assert_eq!(build_network(&c).unwrap(), build_network(&c).unwrap());
        let net = build_network(&c).unwrap();
        assert_simple_cross(&net);
        assert!(net.edge_count() > 0);
    }
}
