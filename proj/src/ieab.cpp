#include "exab/ieab.hpp"

namespace exab {

namespace {

const double kSqrt15 = std::sqrt(15.0);

using Eigen::ArrayXd;

ArrayXd pick(const HistoryWindow& hist, int back, bool stabilizer) {
  const auto& s = hist.newest(back);
  return stabilizer ? s.a.array() : s.b.array();
}

}  // namespace

IeabNodeValues ieab_node_values(int k, double h, const HistoryWindow& hist) {
  if (k < 2 || k > 4) throw std::invalid_argument("ieab_node_values: order must be 2..4");
  if (hist.size() < k) throw std::invalid_argument("ieab_node_values: history too short");

  IeabNodeValues nv;
  const ArrayXd a0 = pick(hist, 0, true);
  const ArrayXd a1 = pick(hist, 1, true);
  const ArrayXd b0 = pick(hist, 0, false);
  const ArrayXd b1 = pick(hist, 1, false);

  if (k == 2) {
    nv.g_end = (3.0 * a0 - a1) * (h / 2.0);
    nv.delta = (7.0 * a0 - 3.0 * a1) * (h / 8.0);
    nv.b_end = 2.0 * b0 - b1;
    nv.b_half = (3.0 * b0 - b1) / 2.0;
    return nv;
  }

  const ArrayXd a2 = pick(hist, 2, true);
  const ArrayXd b2 = pick(hist, 2, false);
  if (k == 3) {
    nv.g_end = (23.0 * a0 - 16.0 * a1 + 5.0 * a2) * (h / 12.0);
    nv.delta = (29.0 * a0 - 25.0 * a1 + 8.0 * a2) * (h / 24.0);
    nv.b_end = 3.0 * b0 - 3.0 * b1 + b2;
    nv.b_half = (15.0 * b0 - 10.0 * b1 + 3.0 * b2) / 8.0;
    return nv;
  }

  const ArrayXd a3 = pick(hist, 3, true);
  const ArrayXd b3 = pick(hist, 3, false);
  nv.g_end = (55.0 * a0 - 59.0 * a1 + 37.0 * a2 - 9.0 * a3) * (h / 24.0);
  nv.g_mid = (297.0 * a0 - 187.0 * a1 + 107.0 * a2 - 25.0 * a3) * (h / 384.0);
  nv.g_right = ((797.0 / 4.0 + 45.0 * kSqrt15) * a0 -
                (2233.0 / 12.0 + 47.0 * kSqrt15) * a1 +
                (1373.0 / 12.0 + 29.0 * kSqrt15) * a2 -
                (331.0 / 12.0 + 7.0 * kSqrt15) * a3) *
               (h / 200.0);
  nv.g_left = ((797.0 / 4.0 - 45.0 * kSqrt15) * a0 -
               (2233.0 / 12.0 - 47.0 * kSqrt15) * a1 +
               (1373.0 / 12.0 - 29.0 * kSqrt15) * a2 -
               (331.0 / 12.0 - 7.0 * kSqrt15) * a3) *
              (h / 200.0);
  nv.b_mid = (35.0 * b0 - 35.0 * b1 + 21.0 * b2 - 5.0 * b3) / 16.0;
  nv.b_right = ((95.0 + 179.0 * kSqrt15 / 15.0) * b0 -
                (107.0 + 119.0 * kSqrt15 / 5.0) * b1 +
                (69.0 + 79.0 * kSqrt15 / 5.0) * b2 -
                (17.0 + 59.0 * kSqrt15 / 15.0) * b3) /
               40.0;
  nv.b_left = ((95.0 - 179.0 * kSqrt15 / 15.0) * b0 -
               (107.0 - 119.0 * kSqrt15 / 5.0) * b1 +
               (69.0 - 79.0 * kSqrt15 / 5.0) * b2 -
               (17.0 - 59.0 * kSqrt15 / 15.0) * b3) /
              40.0;
  return nv;
}

StateVector ieab_step(int k, double h, const HistoryWindow& hist) {
  const IeabNodeValues nv = ieab_node_values(k, h, hist);
  const auto& s = hist.newest();
  const ArrayXd y = s.y.array();
  const ArrayXd b0 = s.b.array();

  if (k <= 3) {
    // Simpson weights (1, 4, 1)/6 applied to exp(g_end - g(node)).*b(node);
    // the t_n term rides inside the first factor
    return (nv.g_end.exp() * (y + b0 * (h / 6.0)) +
            (nv.b_end + 4.0 * nv.delta.exp() * nv.b_half) * (h / 6.0))
        .matrix();
  }
  return (nv.g_end.exp() *
          (y + (h / 18.0) * (5.0 * nv.b_left * (-nv.g_left).exp() +
                             8.0 * nv.b_mid * (-nv.g_mid).exp() +
                             5.0 * nv.b_right * (-nv.g_right).exp())))
      .matrix();
}

}  // namespace exab
