use selectboost::boost::{boost};
use selectboost::grouping::GroupingStrategy;
use selectboost::selectors::{CvConfig, Family, LassoSelector, SelectionMethod};
use selectboost::simulate::{generate_cluster_data, SimulationConfig};
use selectboost::sphere::{default_names, standardize};

fn main() {
    for (wn, rn) in [(0.3f64, 0.1f64), (0.3, 0.2), (0.2, 0.1), (0.15, 0.3)] {
        let config = SimulationConfig {
            n_obs: 50, n_vars: 200, n_active: 10, n_clusters: 5,
            within_cluster_noise: wn, response_noise: rn,
            repetitions: 1, seed: 77,
        };
        let data = generate_cluster_data(&config, 0).unwrap();
        let d = standardize(&data.x, &default_names(200)).unwrap();
        let sel = LassoSelector::new(Family::Logistic, CvConfig { k: 5, grid_size: 50, ..CvConfig::default() });
        let base = sel.select(&d, &data.y_binary).unwrap();
        let groups = GroupingStrategy::Correlation.groups(&d, 0.7).unwrap();
        let fv = boost(&d, &data.y_binary, &sel, &groups, 40, 9).unwrap();
        let z = fv.zeta();
        let actives: Vec<f64> = z[..10].to_vec();
        let noise_z1 = z[10..].iter().filter(|&&v| v == 1.0).count();
        let grouped = (0..10).filter(|&p| !groups.is_singleton(p)).count();
        println!("wn={wn} rn={rn}: base_recall={:.2} base_sel={} grouped_actives={grouped} noise_at_1={noise_z1}",
            base.indices().iter().filter(|&&i| i < 10).count() as f64 / 10.0, base.count());
        println!("  active zeta: {:?}", actives.iter().map(|v| (v*100.0).round()/100.0).collect::<Vec<_>>());
    }
}
