mod oracles;

use proptest::prelude::*;
use recur::burst::{detect_bursts, detect_peaks, DailySeries, PeakParams};

fn params() -> impl Strategy<Value = PeakParams> {
    (1u64..6, 2u32..7, 1usize..5, 1u32..5).prop_map(|(h0, m2, w, v4)| PeakParams {
        h0,
        m_mult: m2 as f64 / 2.0,
        w,
        v: v4 as f64 / 4.0,
    })
}

fn series() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..=30, 1..=15)
}

fn days(counts: &[u64], p: &PeakParams) -> Vec<usize> {
    detect_peaks(&DailySeries::new(counts.to_vec()).unwrap(), p)
        .iter()
        .map(|k| k.day)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4096))]

    #[test]
    fn peaks_match_oracle_and_postconditions(c in series(), p in params()) {
        let got = days(&c, &p);
        prop_assert_eq!(&got, &oracles::peaks(&c, &p));
        if let Err(e) = oracles::check_peak_postconditions(&c, &p, &got) {
            return Err(TestCaseError::fail(e));
        }
        for (d, k) in got.iter().zip(detect_peaks(&DailySeries::new(c.clone()).unwrap(), &p)) {
            prop_assert_eq!(k.height, c[*d]);
        }
    }

    #[test]
    fn detection_is_deterministic(c in series(), p in params()) {
        prop_assert_eq!(days(&c, &p), days(&c, &p));
    }

    #[test]
    fn scaling_keeps_peak_days(c in series(), p in params(), k in 1u64..20) {
        let p1 = PeakParams { h0: 1, ..p };
        let scaled: Vec<u64> = c.iter().map(|x| x * k).collect();
        prop_assert_eq!(days(&c, &p1), days(&scaled, &p1));
    }

    #[test]
    fn bursts_are_disjoint_and_cover_their_peaks(c in prop::collection::vec(0u64..=30, 1..=60), p in params()) {
        let s = DailySeries::new(c.clone()).unwrap();
        let bursts = detect_bursts(&s, &p);
        for b in &bursts {
            prop_assert!(b.start_day <= b.peak.day && b.peak.day <= b.end_day);
            prop_assert_eq!(b.reshares, c[b.start_day..=b.end_day].iter().sum::<u64>());
            prop_assert_eq!(b.width, b.end_day - b.start_day);
        }
        for w in bursts.windows(2) {
            prop_assert!(w[0].end_day < w[1].start_day);
        }
        prop_assert!(bursts.iter().map(|b| b.reshares).sum::<u64>() <= s.total());
    }
}

/// Every series of length 6 over {0, 1, 2, 3} under a spread of parameters.
#[test]
fn exhaustive_short_series_match_oracle() {
    let settings = [
        PeakParams { h0: 1, m_mult: 1.0, w: 1, v: 0.5 },
        PeakParams { h0: 1, m_mult: 1.5, w: 2, v: 1.0 },
        PeakParams { h0: 2, m_mult: 1.0, w: 1, v: 0.25 },
        PeakParams { h0: 1, m_mult: 2.0, w: 3, v: 0.75 },
    ];
    let len = 6;
    for code in 0..4usize.pow(len) {
        let c: Vec<u64> = (0..len).map(|i| (code / 4usize.pow(i) % 4) as u64).collect();
        for p in &settings {
            let got = days(&c, p);
            assert_eq!(got, oracles::peaks(&c, p), "{c:?} {p:?}");
            oracles::check_peak_postconditions(&c, p, &got).unwrap();
        }
    }
}
