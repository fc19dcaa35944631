//! Scenario presets.
//!
//! The two analog presets share 67 crop codes (15 majors + 52 minors);
//! nl-analog adds 74 country-specific minors (141 codes), fr-analog adds
//! 4 majors and 80 minors (151 codes), so the union is 225.
//!
//! Signal structure built into nl-analog:
//! - silage vs grain maize: identical curves, distinct predecessors, so
//!   rotation history resolves them and remote sensing alone cannot;
//! - wheat A vs wheat B: identical curves and identical predecessor
//!   distributions, but regions 0/2 grow only A and region 1 only B, so
//!   the local crop distribution is the only full tiebreaker;
//! - everything else differs in phenology timing and is RS-resolvable.
//!
//! late-analog instead makes three high-mass pairs (wheat, maize, barley)
//! identical until senescence (day 300 vs 350, i.e. after window 18) with
//! near-uniform rotation priors, so only late-season windows separate them.

use super::phenology::{CutRegime, PhenologyParams};
use super::{CropDef, NoiseLevels, RegionConfig, ScenarioConfig, TransitionMatrix};
use crate::rng::stream;
use crate::taxonomy::CropCode;
use rand::Rng;

pub fn preset_names() -> &'static [&'static str] {
    &["tiny", "nl-analog", "fr-analog", "late-analog"]
}

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    match name {
        "tiny" => Some(tiny()),
        "nl-analog" => Some(nl_analog()),
        "fr-analog" => Some(fr_analog()),
        "late-analog" => Some(late_analog()),
        _ => None,
    }
}

fn code(text: &str) -> CropCode {
    CropCode::parse(text).expect("preset codes are well-formed")
}

struct Catalog {
    crops: Vec<CropDef>,
}

impl Catalog {
    fn new() -> Self {
        Catalog { crops: Vec::new() }
    }

    fn add(&mut self, code_text: &str, name: &str, phen: PhenologyParams) -> usize {
        self.crops.push(CropDef {
            code: code(code_text),
            name: name.into(),
            phenology: phen,
            permanent: false,
            paired_with: None,
            divergence_day: None,
            cuts: None,
        });
        self.crops.len() - 1
    }

    fn add_permanent(&mut self, code_text: &str, name: &str, phen: PhenologyParams) -> usize {
        let idx = self.add(code_text, name, phen);
        self.crops[idx].permanent = true;
        idx
    }

    fn pair(&mut self, a: usize, b: usize, divergence_day: Option<f64>) {
        let (ca, cb) = (self.crops[a].code, self.crops[b].code);
        self.crops[a].paired_with = Some(cb);
        self.crops[b].paired_with = Some(ca);
        self.crops[a].divergence_day = divergence_day;
        self.crops[b].divergence_day = divergence_day;
    }
}

fn phen(gu: f64, sen: f64) -> PhenologyParams {
    PhenologyParams::new(gu, sen)
}

/// Deterministic minor-crop phenology derived from the code itself.
fn minor_phenology(c: &CropCode) -> PhenologyParams {
    let mut rng = stream(0x5EED, &c.to_string());
    let gu = rng.gen_range(150.0..250.0);
    let sen = gu + rng.gen_range(70.0..130.0);
    PhenologyParams {
        base: rng.gen_range(0.08..0.18),
        amplitude: rng.gen_range(0.55..0.85),
        green_up_day: gu,
        senescence_day: sen,
        green_up_rate: rng.gen_range(0.04..0.08),
        senescence_rate: rng.gen_range(0.06..0.11),
    }
}

fn add_minors(cat: &mut Catalog, level2_start: u8, count: usize, label: &str) -> Vec<usize> {
    (0..count)
        .map(|k| {
            let c = CropCode::new([33, level2_start + (k / 9) as u8, (k % 9 + 1) as u8, 0, 0])
                .expect("minor codes stay in range");
            let idx = cat.add(&c.to_string(), &format!("{label} {k}"), minor_phenology(&c));
            cat.crops[idx].code = c;
            idx
        })
        .collect()
}

/// The 15 majors shared by both countries. Indices are returned in a fixed
/// struct so the transition tables read by name.
struct SharedMajors {
    grass: usize,
    leafy_single: usize,
    leafy_multi: usize,
    potato: usize,
    beet: usize,
    silage: usize,
    grain: usize,
    wheat_a: usize,
    wheat_b: usize,
    wbarley: usize,
    sbarley: usize,
    onion: usize,
    carrot: usize,
    rape: usize,
    legume: usize,
    fallow: usize,
    orchard: usize,
}

fn shared_majors(cat: &mut Catalog) -> SharedMajors {
    let grass = cat.add(
        "35-01-01-00-00",
        "grassland",
        PhenologyParams { base: 0.50, amplitude: 0.32, ..phen(120.0, 352.0) },
    );
    let potato = cat.add("33-02-01-01-00", "potato", phen(215.0, 330.0));
    let beet = cat.add("33-02-02-01-00", "sugar beet", phen(220.0, 350.0));
    let silage = cat.add("33-03-01-01-00", "silage maize", phen(235.0, 340.0));
    let grain = cat.add("33-03-01-02-00", "grain maize", phen(235.0, 340.0));
    let wheat_a = cat.add(
        "33-01-01-01-01",
        "winter wheat a",
        PhenologyParams { green_up_rate: 0.03, ..phen(130.0, 290.0) },
    );
    let wheat_b = cat.add(
        "33-01-01-01-02",
        "winter wheat b",
        PhenologyParams { green_up_rate: 0.03, ..phen(130.0, 290.0) },
    );
    let wbarley = cat.add(
        "33-01-02-01-00",
        "winter barley",
        PhenologyParams { green_up_rate: 0.035, ..phen(110.0, 275.0) },
    );
    let sbarley = cat.add("33-01-02-02-00", "spring barley", phen(190.0, 300.0));
    let onion = cat.add("33-04-01-01-00", "onion", phen(210.0, 320.0));
    let carrot = cat.add("33-04-02-01-00", "carrot", phen(215.0, 345.0));
    let rape = cat.add(
        "33-06-01-01-00",
        "winter rapeseed",
        PhenologyParams { green_up_rate: 0.04, ..phen(100.0, 285.0) },
    );
    let legume = cat.add("33-07-01-01-00", "field legumes", phen(200.0, 295.0));
    // Leafy vegetables: identical plateau curves; the single-harvest regime
    // takes one long cut, the multi-cut regime three short ones with the
    // same expected total dip. Only the event count separates them, and
    // event positions are random per parcel-season.
    let leafy_curve = || PhenologyParams { base: 0.10, amplitude: 0.78, ..phen(185.0, 345.0) };
    let leafy_single = cat.add("33-04-03-01-00", "leafy veg single harvest", leafy_curve());
    cat.crops[leafy_single].cuts = Some(CutRegime {
        count: 1,
        depth: 0.50,
        depth_jitter: 0.10,
        len_days: 36.0,
        len_jitter: 6.0,
        window_start: 225.0,
        window_end: 320.0,
    });
    let leafy_multi = cat.add("33-04-03-02-00", "leafy veg multi cut", leafy_curve());
    cat.crops[leafy_multi].cuts = Some(CutRegime {
        count: 3,
        depth: 0.50,
        depth_jitter: 0.10,
        len_days: 12.0,
        len_jitter: 2.0,
        window_start: 215.0,
        window_end: 330.0,
    });
    let fallow = cat.add(
        "33-08-01-00-00",
        "fallow",
        PhenologyParams { base: 0.15, amplitude: 0.15, ..phen(150.0, 330.0) },
    );
    let orchard = cat.add_permanent(
        "34-01-01-01-00",
        "orchard",
        PhenologyParams { base: 0.35, amplitude: 0.35, ..phen(170.0, 350.0) },
    );
    cat.pair(silage, grain, None);
    cat.pair(wheat_a, wheat_b, None);
    cat.pair(leafy_single, leafy_multi, None);
    SharedMajors {
        grass,
        leafy_single,
        leafy_multi,
        potato,
        beet,
        silage,
        grain,
        wheat_a,
        wheat_b,
        wbarley,
        sbarley,
        onion,
        carrot,
        rape,
        legume,
        fallow,
        orchard,
    }
}

/// Builds one region's transition matrix from major successor rules.
/// Every non-permanent major row reserves `minor_mass` spread uniformly over
/// the minors; minor rows mostly return to the majors.
fn build_matrix(
    n: usize,
    rules: &[(usize, Vec<(usize, f64)>)],
    minors: &[usize],
    minor_mass: f64,
    minor_return: &[(usize, f64)],
    initial: &[(usize, f64)],
    initial_minor_mass: f64,
) -> TransitionMatrix {
    let normalize = |pairs: &[(usize, f64)], scale: f64| -> Vec<f64> {
        let total: f64 = pairs.iter().map(|(_, p)| p).sum();
        let mut row = vec![0.0; n];
        for (idx, p) in pairs {
            row[*idx] += p / total * scale;
        }
        row
    };
    let spread_minors = |row: &mut Vec<f64>, mass: f64| {
        if minors.is_empty() {
            // Renormalize the explicit entries instead.
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
            return;
        }
        for m in minors {
            row[*m] += mass / minors.len() as f64;
        }
    };

    let mut rows = vec![Vec::new(); n];
    for (from, succ) in rules {
        let mut row = normalize(succ, 1.0 - minor_mass);
        spread_minors(&mut row, minor_mass);
        rows[*from] = row;
    }
    // Minor rows: return to majors, keep a small self-loop.
    for m in minors {
        let mut pairs = minor_return.to_vec();
        pairs.push((*m, 0.10));
        rows[*m] = normalize(&pairs, 1.0);
    }
    // Any crop without a rule (e.g. other country's majors) self-loops; it
    // never appears as a state in this region anyway.
    for (i, row) in rows.iter_mut().enumerate() {
        if row.is_empty() {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            *row = r;
        }
    }

    let mut init = normalize(initial, 1.0 - initial_minor_mass);
    spread_minors(&mut init, initial_minor_mass);

    TransitionMatrix { rows, initial: init }
}

/// Successor rules shared by the nl-analog regions; `w` is the region's
/// wheat variant.
#[allow(clippy::too_many_arguments)]
fn nl_rules(m: &SharedMajors, w: usize) -> Vec<(usize, Vec<(usize, f64)>)> {
    vec![
        (m.grass, vec![(m.grass, 0.88), (m.silage, 0.08), (m.potato, 0.02), (m.fallow, 0.02)]),
        (
            m.potato,
            vec![(m.beet, 0.26), (w, 0.28), (m.onion, 0.10), (m.grain, 0.12), (m.sbarley, 0.09), (m.legume, 0.05), (m.leafy_single, 0.05), (m.leafy_multi, 0.05)],
        ),
        (
            m.beet,
            vec![(m.potato, 0.28), (w, 0.28), (m.sbarley, 0.13), (m.onion, 0.08), (m.grain, 0.10), (m.carrot, 0.05), (m.leafy_single, 0.04), (m.leafy_multi, 0.04)],
        ),
        (m.silage, vec![(m.silage, 0.50), (m.grass, 0.34), (m.potato, 0.08), (w, 0.08)]),
        (
            m.grain,
            vec![(m.potato, 0.32), (m.beet, 0.26), (w, 0.22), (m.onion, 0.10), (m.legume, 0.10)],
        ),
        (
            m.wheat_a,
            vec![(m.potato, 0.30), (m.beet, 0.22), (m.onion, 0.10), (m.sbarley, 0.08), (m.rape, 0.08), (m.legume, 0.06), (m.wbarley, 0.06), (m.leafy_single, 0.05), (m.leafy_multi, 0.05)],
        ),
        (
            m.wheat_b,
            vec![(m.potato, 0.30), (m.beet, 0.22), (m.onion, 0.10), (m.sbarley, 0.08), (m.rape, 0.08), (m.legume, 0.06), (m.wbarley, 0.06), (m.leafy_single, 0.05), (m.leafy_multi, 0.05)],
        ),
        (m.wbarley, vec![(m.potato, 0.30), (m.beet, 0.22), (w, 0.20), (m.rape, 0.14), (m.legume, 0.14)]),
        (m.sbarley, vec![(m.potato, 0.30), (m.beet, 0.24), (w, 0.24), (m.onion, 0.12), (m.carrot, 0.10)]),
        (m.onion, vec![(m.potato, 0.28), (w, 0.26), (m.beet, 0.18), (m.carrot, 0.10), (m.legume, 0.08), (m.leafy_single, 0.05), (m.leafy_multi, 0.05)]),
        (m.carrot, vec![(m.potato, 0.28), (w, 0.24), (m.beet, 0.20), (m.onion, 0.10), (m.sbarley, 0.08), (m.leafy_single, 0.05), (m.leafy_multi, 0.05)]),
        (m.leafy_single, vec![(m.potato, 0.40), (w, 0.30), (m.onion, 0.15), (m.beet, 0.15)]),
        (m.leafy_multi, vec![(m.potato, 0.40), (w, 0.30), (m.onion, 0.15), (m.beet, 0.15)]),
        (m.rape, vec![(w, 0.50), (m.wbarley, 0.25), (m.beet, 0.15), (m.legume, 0.10)]),
        (m.legume, vec![(w, 0.40), (m.potato, 0.30), (m.beet, 0.20), (m.onion, 0.10)]),
        (m.fallow, vec![(m.fallow, 0.30), (m.grass, 0.25), (m.potato, 0.15), (w, 0.15), (m.sbarley, 0.15)]),
        (m.orchard, vec![(m.orchard, 0.99), (m.grass, 0.01)]),
    ]
}

fn nl_initial(m: &SharedMajors, w: usize) -> Vec<(usize, f64)> {
    vec![
        (m.grass, 0.30),
        (m.potato, 0.10),
        (m.beet, 0.07),
        (m.silage, 0.07),
        (m.grain, 0.05),
        (w, 0.13),
        (m.wbarley, 0.04),
        (m.sbarley, 0.05),
        (m.onion, 0.04),
        (m.carrot, 0.03),
        (m.rape, 0.03),
        (m.orchard, 0.03),
        (m.legume, 0.02),
        (m.fallow, 0.02),
        (m.leafy_single, 0.035),
        (m.leafy_multi, 0.035),
    ]
}

fn nl_regions(m: &SharedMajors, n: usize, minors: &[usize]) -> Vec<RegionConfig> {
    let minor_return =
        [(m.grass, 0.25), (m.potato, 0.20), (m.wheat_a, 0.10), (m.wheat_b, 0.10), (m.beet, 0.15), (m.sbarley, 0.10)];
    let centers = [(0.0, 0.0), (70.0, 0.0), (0.0, 70.0)];
    let wheat_variant = [m.wheat_a, m.wheat_b, m.wheat_a];
    centers
        .iter()
        .zip(wheat_variant)
        .map(|(&(x, y), w)| RegionConfig {
            center_x_km: x,
            center_y_km: y,
            spread_km: 12.0,
            weight: 1.0,
            transitions: build_matrix(
                n,
                &nl_rules(m, w),
                minors,
                0.05,
                &minor_return,
                &nl_initial(m, w),
                0.02,
            ),
        })
        .collect()
}

fn base_config(name: &str, country: &str, crops: Vec<CropDef>, regions: Vec<RegionConfig>) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        country: country.into(),
        n_fois: 5000,
        n_seasons: 5,
        first_season: 2016,
        crops,
        regions,
        cadence_min_days: 2,
        cadence_max_days: 4,
        contamination: 0.02,
        qa_invalid_rate: 0.02,
        noise: NoiseLevels::default(),
        spike_sigmas: 6.0,
        phenology_jitter_days: 9.0,
        area_ha_min: 0.5,
        area_ha_max: 12.0,
        seed: 2016,
    }
}

fn nl_analog() -> ScenarioConfig {
    let mut cat = Catalog::new();
    let majors = shared_majors(&mut cat);
    let shared_minors = add_minors(&mut cat, 20, 50, "shared minor");
    let nl_minors = add_minors(&mut cat, 30, 74, "nl minor");
    let minors: Vec<usize> = shared_minors.into_iter().chain(nl_minors).collect();
    let n = cat.crops.len();
    debug_assert_eq!(n, 141);
    let regions = nl_regions(&majors, n, &minors);
    base_config("nl-analog", "NL", cat.crops, regions)
}

fn fr_analog() -> ScenarioConfig {
    let mut cat = Catalog::new();
    let m = shared_majors(&mut cat);
    let shared_minors = add_minors(&mut cat, 20, 50, "shared minor");
    let sunflower = cat.add("33-06-02-01-00", "sunflower", phen(240.0, 320.0));
    let durum = cat.add(
        "33-01-01-02-00",
        "durum wheat",
        PhenologyParams { green_up_rate: 0.035, ..phen(140.0, 285.0) },
    );
    let sorghum = cat.add("33-03-02-01-00", "sorghum", phen(245.0, 335.0));
    let vineyard = cat.add_permanent(
        "34-02-01-01-00",
        "vineyard",
        PhenologyParams { base: 0.30, amplitude: 0.30, ..phen(180.0, 340.0) },
    );
    let fr_minors = add_minors(&mut cat, 40, 80, "fr minor");
    let minors: Vec<usize> = shared_minors.into_iter().chain(fr_minors).collect();
    let n = cat.crops.len();
    debug_assert_eq!(n, 151);

    let minor_return =
        [(m.grass, 0.20), (m.wheat_a, 0.15), (m.wheat_b, 0.10), (sunflower, 0.15), (m.beet, 0.10), (m.potato, 0.10)];
    // North: cereal plain; west: dairy and maize; south: sunflower and vines.
    let north_rules = {
        let mut r = nl_rules(&m, m.wheat_a);
        r.push((sunflower, vec![(m.wheat_a, 0.5), (m.wbarley, 0.3), (m.rape, 0.2)]));
        r.push((durum, vec![(m.wheat_a, 0.4), (m.rape, 0.3), (m.legume, 0.3)]));
        r.push((sorghum, vec![(m.wheat_a, 0.6), (m.legume, 0.4)]));
        r.push((vineyard, vec![(vineyard, 0.99), (m.grass, 0.01)]));
        r
    };
    let west_rules = {
        let mut r = nl_rules(&m, m.wheat_a);
        r.push((sunflower, vec![(m.grain, 0.5), (m.wheat_a, 0.5)]));
        r.push((durum, vec![(m.grain, 0.5), (m.grass, 0.5)]));
        r.push((sorghum, vec![(m.grain, 0.5), (m.grass, 0.5)]));
        r.push((vineyard, vec![(vineyard, 0.99), (m.grass, 0.01)]));
        r
    };
    let south_rules = vec![
        (m.grass, vec![(m.grass, 0.85), (sunflower, 0.08), (durum, 0.07)]),
        (sunflower, vec![(durum, 0.45), (m.wheat_b, 0.25), (sorghum, 0.15), (m.legume, 0.15)]),
        (durum, vec![(sunflower, 0.45), (sorghum, 0.20), (m.legume, 0.15), (m.wheat_b, 0.20)]),
        (sorghum, vec![(durum, 0.5), (sunflower, 0.3), (m.legume, 0.2)]),
        (vineyard, vec![(vineyard, 0.99), (m.grass, 0.01)]),
        (m.wheat_b, vec![(sunflower, 0.5), (sorghum, 0.2), (durum, 0.3)]),
        (m.legume, vec![(durum, 0.5), (sunflower, 0.5)]),
        (m.potato, vec![(durum, 0.5), (sunflower, 0.5)]),
        (m.beet, vec![(durum, 0.5), (m.wheat_b, 0.5)]),
        (m.silage, vec![(m.grass, 0.5), (m.silage, 0.5)]),
        (m.grain, vec![(durum, 0.5), (sunflower, 0.5)]),
        (m.wheat_a, vec![(sunflower, 0.6), (durum, 0.4)]),
        (m.wbarley, vec![(durum, 0.5), (sunflower, 0.5)]),
        (m.sbarley, vec![(durum, 0.5), (sunflower, 0.5)]),
        (m.onion, vec![(durum, 0.5), (sunflower, 0.5)]),
        (m.carrot, vec![(durum, 0.5), (sunflower, 0.5)]),
        (m.rape, vec![(durum, 0.5), (m.wheat_b, 0.5)]),
        (m.fallow, vec![(m.fallow, 0.3), (durum, 0.35), (sunflower, 0.35)]),
        (m.orchard, vec![(m.orchard, 0.99), (m.grass, 0.01)]),
        (m.leafy_single, vec![(durum, 0.5), (sunflower, 0.5)]),
        (m.leafy_multi, vec![(durum, 0.5), (sunflower, 0.5)]),
    ];
    let north_init = nl_initial(&m, m.wheat_a);
    let west_init = {
        let mut i = nl_initial(&m, m.wheat_a);
        for (idx, p) in i.iter_mut() {
            if *idx == m.silage || *idx == m.grass {
                *p *= 1.5;
            }
        }
        i
    };
    let south_init = vec![
        (m.grass, 0.22),
        (sunflower, 0.20),
        (durum, 0.22),
        (sorghum, 0.08),
        (vineyard, 0.12),
        (m.wheat_b, 0.08),
        (m.legume, 0.04),
        (m.fallow, 0.04),
    ];

    let mk = |center: (f64, f64), rules: &[(usize, Vec<(usize, f64)>)], init: &[(usize, f64)]| RegionConfig {
        center_x_km: center.0,
        center_y_km: center.1,
        spread_km: 14.0,
        weight: 1.0,
        transitions: build_matrix(n, rules, &minors, 0.05, &minor_return, init, 0.02),
    };
    let regions = vec![
        mk((200.0, 0.0), &north_rules, &north_init),
        mk((200.0, 80.0), &west_rules, &west_init),
        mk((280.0, 40.0), &south_rules, &south_init),
    ];

    let mut cfg = base_config("fr-analog", "FR", cat.crops, regions);
    cfg.n_fois = 6000;
    cfg.seed = 2015;
    cfg
}

/// nl-analog geometry with three high-mass pairs that separate only at
/// senescence: one member dries down at day 300, the other at day 350.
/// Rotation priors into each pair are near-uniform, so before the curves
/// diverge no modality fully resolves them.
fn late_analog() -> ScenarioConfig {
    let mut cat = Catalog::new();
    let m = shared_majors(&mut cat);
    let shared_minors = add_minors(&mut cat, 20, 50, "shared minor");
    let minors = shared_minors;
    let n = cat.crops.len();

    // Re-time the pairs: identical until late season.
    let late = |sen: f64| PhenologyParams {
        green_up_rate: 0.05,
        senescence_rate: 0.12,
        ..phen(170.0, sen)
    };
    cat.crops[m.wheat_a].phenology = late(300.0);
    cat.crops[m.wheat_b].phenology = late(350.0);
    cat.crops[m.silage].phenology = PhenologyParams { green_up_rate: 0.06, senescence_rate: 0.12, ..phen(230.0, 300.0) };
    cat.crops[m.grain].phenology = PhenologyParams { green_up_rate: 0.06, senescence_rate: 0.12, ..phen(230.0, 350.0) };
    cat.crops[m.wbarley].phenology = PhenologyParams { green_up_rate: 0.05, senescence_rate: 0.12, ..phen(140.0, 300.0) };
    cat.crops[m.sbarley].phenology = PhenologyParams { green_up_rate: 0.05, senescence_rate: 0.12, ..phen(140.0, 350.0) };
    for (a, b) in [(m.wheat_a, m.wheat_b), (m.silage, m.grain), (m.wbarley, m.sbarley)] {
        cat.pair(a, b, Some(285.0));
    }

    // Near-uniform priors into each pair member.
    let rules: Vec<(usize, Vec<(usize, f64)>)> = vec![
        (m.grass, vec![(m.grass, 0.80), (m.silage, 0.05), (m.grain, 0.05), (m.potato, 0.05), (m.fallow, 0.05)]),
        (m.potato, vec![(m.wheat_a, 0.2), (m.wheat_b, 0.2), (m.beet, 0.2), (m.onion, 0.2), (m.silage, 0.1), (m.grain, 0.1)]),
        (m.beet, vec![(m.wheat_a, 0.2), (m.wheat_b, 0.2), (m.potato, 0.3), (m.wbarley, 0.15), (m.sbarley, 0.15)]),
        (m.silage, vec![(m.grass, 0.3), (m.wheat_a, 0.15), (m.wheat_b, 0.15), (m.silage, 0.2), (m.grain, 0.2)]),
        (m.grain, vec![(m.grass, 0.3), (m.wheat_a, 0.15), (m.wheat_b, 0.15), (m.silage, 0.2), (m.grain, 0.2)]),
        (m.wheat_a, vec![(m.potato, 0.3), (m.beet, 0.2), (m.wbarley, 0.125), (m.sbarley, 0.125), (m.onion, 0.15), (m.rape, 0.1)]),
        (m.wheat_b, vec![(m.potato, 0.3), (m.beet, 0.2), (m.wbarley, 0.125), (m.sbarley, 0.125), (m.onion, 0.15), (m.rape, 0.1)]),
        (m.wbarley, vec![(m.potato, 0.3), (m.beet, 0.3), (m.wheat_a, 0.15), (m.wheat_b, 0.15), (m.rape, 0.1)]),
        (m.sbarley, vec![(m.potato, 0.3), (m.beet, 0.3), (m.wheat_a, 0.15), (m.wheat_b, 0.15), (m.rape, 0.1)]),
        (m.onion, vec![(m.potato, 0.4), (m.wheat_a, 0.15), (m.wheat_b, 0.15), (m.beet, 0.3)]),
        (m.carrot, vec![(m.potato, 0.5), (m.beet, 0.5)]),
        (m.rape, vec![(m.wheat_a, 0.25), (m.wheat_b, 0.25), (m.wbarley, 0.25), (m.sbarley, 0.25)]),
        (m.legume, vec![(m.wheat_a, 0.3), (m.wheat_b, 0.3), (m.potato, 0.4)]),
        (m.fallow, vec![(m.fallow, 0.3), (m.grass, 0.3), (m.potato, 0.2), (m.beet, 0.2)]),
        (m.orchard, vec![(m.orchard, 0.99), (m.grass, 0.01)]),
    ];
    let initial = vec![
        (m.grass, 0.20),
        (m.wheat_a, 0.10),
        (m.wheat_b, 0.10),
        (m.silage, 0.07),
        (m.grain, 0.07),
        (m.wbarley, 0.05),
        (m.sbarley, 0.05),
        (m.potato, 0.12),
        (m.beet, 0.09),
        (m.onion, 0.05),
        (m.carrot, 0.02),
        (m.rape, 0.03),
        (m.legume, 0.02),
        (m.fallow, 0.01),
        (m.orchard, 0.02),
    ];
    let minor_return = [(m.grass, 0.3), (m.potato, 0.3), (m.beet, 0.3)];
    let regions = [(0.0, 0.0), (70.0, 0.0), (0.0, 70.0)]
        .into_iter()
        .map(|(x, y)| RegionConfig {
            center_x_km: x,
            center_y_km: y,
            spread_km: 12.0,
            weight: 1.0,
            transitions: build_matrix(n, &rules, &minors, 0.04, &minor_return, &initial, 0.02),
        })
        .collect();

    let mut cfg = base_config("late-analog", "NL", cat.crops, regions);
    cfg.n_fois = 3000;
    cfg.seed = 2017;
    cfg
}

fn tiny() -> ScenarioConfig {
    let mut cat = Catalog::new();
    let grass = cat.add(
        "35-01-01-00-00",
        "grassland",
        PhenologyParams { base: 0.50, amplitude: 0.32, ..phen(120.0, 352.0) },
    );
    let potato = cat.add("33-02-01-01-00", "potato", phen(215.0, 330.0));
    let wheat = cat.add(
        "33-01-01-01-01",
        "winter wheat a",
        PhenologyParams { green_up_rate: 0.03, ..phen(130.0, 290.0) },
    );
    let silage = cat.add("33-03-01-01-00", "silage maize", phen(235.0, 340.0));
    let beet = cat.add("33-02-02-01-00", "sugar beet", phen(220.0, 350.0));
    let orchard = cat.add_permanent(
        "34-01-01-01-00",
        "orchard",
        PhenologyParams { base: 0.35, amplitude: 0.35, ..phen(170.0, 350.0) },
    );
    let n = cat.crops.len();
    let rules = vec![
        (grass, vec![(grass, 0.85), (silage, 0.10), (potato, 0.05)]),
        (potato, vec![(wheat, 0.5), (beet, 0.5)]),
        (wheat, vec![(potato, 0.5), (beet, 0.3), (silage, 0.2)]),
        (silage, vec![(grass, 0.4), (silage, 0.4), (wheat, 0.2)]),
        (beet, vec![(potato, 0.5), (wheat, 0.5)]),
        (orchard, vec![(orchard, 0.99), (grass, 0.01)]),
    ];
    let initial = vec![
        (grass, 0.35),
        (potato, 0.15),
        (wheat, 0.20),
        (silage, 0.12),
        (beet, 0.12),
        (orchard, 0.06),
    ];
    let regions = vec![RegionConfig {
        center_x_km: 0.0,
        center_y_km: 0.0,
        spread_km: 8.0,
        weight: 1.0,
        transitions: build_matrix(n, &rules, &[], 0.0, &[], &initial, 0.0),
    }];
    let mut cfg = base_config("tiny", "NL", cat.crops, regions);
    cfg.n_fois = 60;
    cfg.n_seasons = 4;
    cfg.seed = 7;
    cfg
}
