use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{rng_for, stream, AssignmentMode, Network, NetworkConfig, Scheme, SimError};
use crate::latin::{generate_mols, next_prime, Hop, LatinRectangle, OrthogonalFamily, Symbol};

/// Static per-superframe hop list of every sensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub scheme: Scheme,
    pub channels: usize,
    pub frame_length: usize,
    /// Per sensor, sorted by slot.
    pub hops: Vec<Vec<Hop>>,
    /// Rectangle index per network (Latin scheme only).
    pub rectangles: Option<Vec<usize>>,
    /// Symbol per sensor (Latin scheme only).
    pub symbols: Option<Vec<Symbol>>,
}

impl Schedule {
    pub fn n_sensors(&self) -> usize {
        self.hops.len()
    }

    pub fn total_hops(&self) -> usize {
        self.hops.iter().map(Vec::len).sum()
    }
}

/// Complete family over the smallest prime covering both the channel count
/// and the frame length.
pub fn dail_family(cfg: &NetworkConfig) -> Result<OrthogonalFamily, SimError> {
    Ok(generate_mols(next_prime(cfg.channels.max(cfg.frame_length)))?)
}

/// Each network draws a rectangle from `family` (distinct ones in
/// coordinated mode) and hands `L` distinct random symbols to its sensors.
pub fn assign_dail_schedules(net: &Network, family: &OrthogonalFamily, cfg: &NetworkConfig) -> Result<Schedule, SimError> {
    let q = family.order();
    check_dail(net, family, cfg)?;
    let mut rng = rng_for(cfg.seed, stream::SCHEDULE);
    let nw = net.n_wbans();
    let rectangles: Vec<usize> = match cfg.assignment_mode {
        AssignmentMode::CoordinatedDistinct => {
            if nw > family.len() {
                return Err(SimError::NotEnoughRectangles { networks: nw, family: family.len() });
            }
            sample(&mut rng, family.len(), nw).into_vec()
        }
        AssignmentMode::IidRandom => (0..nw).map(|_| rng.random_range(0..family.len())).collect(),
    };
    let mut symbols = vec![0; net.n_sensors()];
    for w in net.wbans() {
        if w.sensors.len() > q {
            return Err(SimError::NotEnoughSymbols { sensors: w.sensors.len(), alphabet: q });
        }
        for (&s, sym) in w.sensors.iter().zip(sample(&mut rng, q, w.sensors.len())) {
            symbols[s] = sym as Symbol;
        }
    }
    assign_dail_with(net, family, cfg, &rectangles, &symbols)
}

/// Latin schedule from explicit rectangle indices (per network) and symbols
/// (per sensor).
pub fn assign_dail_with(
    net: &Network,
    family: &OrthogonalFamily,
    cfg: &NetworkConfig,
    rectangles: &[usize],
    symbols: &[Symbol],
) -> Result<Schedule, SimError> {
    check_dail(net, family, cfg)?;
    let rows = cfg.channels.min(family.order());
    let cut = rectangles.iter().map(|&r| family.rectangle(r, rows, cfg.frame_length)).collect::<Result<Vec<_>, _>>()?;
    assign_dail_rectangles(net, &cut, symbols)
}

/// Latin schedule from one rectangle per network, which need not come from
/// an orthogonal family. All rectangles must share one shape.
pub fn assign_dail_rectangles(net: &Network, rectangles: &[LatinRectangle], symbols: &[Symbol]) -> Result<Schedule, SimError> {
    if rectangles.len() != net.n_wbans() || symbols.len() != net.n_sensors() {
        return Err(SimError::Config(format!(
            "{} rectangles and {} symbols for {} networks and {} sensors",
            rectangles.len(),
            symbols.len(),
            net.n_wbans(),
            net.n_sensors()
        )));
    }
    let Some(first) = rectangles.first() else {
        return Err(SimError::Config("no networks to schedule".into()));
    };
    let shape = (first.channels(), first.slots());
    if let Some(r) = rectangles.iter().find(|r| (r.channels(), r.slots()) != shape) {
        return Err(SimError::Config(format!("rectangle {}x{} differs from {}x{}", r.channels(), r.slots(), shape.0, shape.1)));
    }
    let mut hops = Vec::with_capacity(net.n_sensors());
    for (s, &sym) in symbols.iter().enumerate() {
        let mut h = rectangles[net.wban_of(s)].pattern(sym)?.hops().to_vec();
        h.sort_by_key(|h| h.slot);
        hops.push(h);
    }
    Ok(Schedule {
        scheme: Scheme::Dail,
        channels: shape.0,
        frame_length: shape.1,
        hops,
        rectangles: Some(rectangles.iter().map(LatinRectangle::index).collect()),
        symbols: Some(symbols.to_vec()),
    })
}

fn check_dail(net: &Network, family: &OrthogonalFamily, cfg: &NetworkConfig) -> Result<(), SimError> {
    cfg.validate()?;
    if family.is_empty() {
        return Err(SimError::NotEnoughRectangles { networks: net.n_wbans(), family: 0 });
    }
    if family.order() < cfg.frame_length {
        return Err(SimError::FrameTooLong { order: family.order(), frame: cfg.frame_length });
    }
    Ok(())
}

/// Static-channel baseline.
///
/// Every sensor owns `min(M, FL)` random slots and one channel for the whole
/// run. Channels come from a greedy colouring in random sensor order over the
/// conflict graph (interference edges plus same-network sensors with a shared
/// slot); a sensor whose neighbours already use all `M` channels keeps a
/// uniformly random one.
pub fn assign_sms_schedules(net: &Network, cfg: &NetworkConfig) -> Result<Schedule, SimError> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, stream::SCHEDULE);
    let n = net.n_sensors();
    let (m, fl) = (cfg.channels, cfg.frame_length);
    let per_sensor = m.min(fl);
    let slots: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut v = sample(&mut rng, fl, per_sensor).into_vec();
            v.sort_unstable();
            v
        })
        .collect();
    let mut channel: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut slot_mask = vec![vec![false; fl]; n];
    for (s, v) in slots.iter().enumerate() {
        v.iter().for_each(|&t| slot_mask[s][t] = true);
    }
    let share_slot = |a: usize, b: usize| slots[a].iter().any(|&t| slot_mask[b][t]);

    let mut coloured = vec![false; n];
    let mut used = vec![false; m];
    for &s in &order {
        used.fill(false);
        let siblings = net.wbans()[net.wban_of(s)].sensors.iter().copied().filter(|&t| t != s && share_slot(s, t));
        for t in net.neighbors(s).iter().copied().chain(siblings) {
            if coloured[t] {
                used[channel[t]] = true;
            }
        }
        if let Some(c) = used.iter().position(|u| !u) {
            channel[s] = c;
        }
        coloured[s] = true;
    }

    let hops = slots.iter().zip(&channel).map(|(v, &c)| v.iter().map(|&slot| Hop { channel: c, slot }).collect()).collect();
    Ok(Schedule { scheme: Scheme::Sms, channels: m, frame_length: fl, hops, rectangles: None, symbols: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{build_network, Geometry};

    fn cfg(n: usize, l: usize, q: usize) -> NetworkConfig {
        let mut c = NetworkConfig::new(n, l);
        c.geometry = Geometry::AbstractQ { neighbors: q };
        c.frame_length = 12;
        c
    }

    #[test]
    fn coordinated_rectangles_are_distinct() {
        let c = cfg(16, 12, 10);
        let net = build_network(&c).unwrap();
        let fam = dail_family(&c).unwrap();
        assert_eq!(fam.order(), 17);
        let s = assign_dail_schedules(&net, &fam, &c).unwrap();
        let mut r = s.rectangles.clone().unwrap();
        r.sort_unstable();
        r.dedup();
        assert_eq!(r.len(), 16);
    }

    #[test]
    fn sensors_of_a_network_get_distinct_symbols() {
        let c = cfg(5, 12, 4);
        let net = build_network(&c).unwrap();
        let s = assign_dail_schedules(&net, &dail_family(&c).unwrap(), &c).unwrap();
        let syms = s.symbols.as_ref().unwrap();
        for w in net.wbans() {
            let mut v: Vec<_> = w.sensors.iter().map(|&x| syms[x]).collect();
            v.sort_unstable();
            v.dedup();
            assert_eq!(v.len(), 12);
        }
        // a 16x12 cut of order 17: each symbol misses the one row it would
        // need in a skipped column at most once
        assert!(s.hops.iter().all(|h| h.len() == 11 || h.len() == 12));
    }

    #[test]
    fn dail_errors() {
        let c = cfg(17, 12, 4);
        let net = build_network(&c).unwrap();
        let fam = dail_family(&c).unwrap();
        assert!(matches!(assign_dail_schedules(&net, &fam, &c), Err(SimError::NotEnoughRectangles { .. })));
        let mut iid = c.clone();
        iid.assignment_mode = AssignmentMode::IidRandom;
        assert!(assign_dail_schedules(&net, &fam, &iid).is_ok());

        let c = cfg(2, 18, 4);
        let net = build_network(&c).unwrap();
        assert!(matches!(assign_dail_schedules(&net, &fam, &c), Err(SimError::NotEnoughSymbols { .. })));

        let mut c = cfg(2, 4, 1);
        c.frame_length = 20;
        assert!(matches!(assign_dail_schedules(&net, &fam, &c), Err(SimError::FrameTooLong { .. })));
    }

    #[test]
    fn sms_colours_small_clique() {
        let mut c = cfg(2, 4, 4);
        c.channels = 8;
        c.frame_length = 8;
        let net = build_network(&c).unwrap();
        let s = assign_sms_schedules(&net, &c).unwrap();
        let mut ch: Vec<_> = s.hops.iter().map(|h| h[0].channel).collect();
        ch.sort_unstable();
        ch.dedup();
        assert_eq!(ch.len(), 8);
        assert!(s.hops.iter().all(|h| h.len() == 8 && h.iter().all(|x| x.channel == h[0].channel)));
    }
}
