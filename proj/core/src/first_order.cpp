#include "nsqn/first_order.hpp"

#include <cmath>

#include "nsqn/errors.hpp"

namespace nsqn {

void AdamHyper::validate() const {
    if (!(alpha > 0.0)) throw ParameterError("AdamHyper: alpha must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ParameterError("AdamHyper: beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ParameterError("AdamHyper: beta2 must be in [0, 1)");
    if (!(eps > 0.0)) throw ParameterError("AdamHyper: eps must be > 0");
}

void adam_step(ParamVector& w, AdamState& st, const ParamVector& grad, const AdamHyper& hp) {
    require_same_length(w, grad, "adam_step");
    require_same_length(w, st.m, "adam_step");
    ++st.step;
    const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double g = grad[i];
        st.m[i] = hp.beta1 * st.m[i] + (1.0 - hp.beta1) * g;
        st.v[i] = hp.beta2 * st.v[i] + (1.0 - hp.beta2) * g * g;
        const double m_hat = st.m[i] / bc1;
        const double v_hat = st.v[i] / bc2;
        w[i] -= hp.alpha * m_hat / (std::sqrt(v_hat) + hp.eps);
    }
}

void AdagradHyper::validate() const {
    if (!(alpha > 0.0)) throw ParameterError("AdagradHyper: alpha must be > 0");
    if (!(eps > 0.0)) throw ParameterError("AdagradHyper: eps must be > 0");
}

void adagrad_step(ParamVector& w, AdagradState& st, const ParamVector& grad, const AdagradHyper& hp) {
    require_same_length(w, grad, "adagrad_step");
    st.accum.add(grad);
    const ParamVector& sums = st.accum.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= hp.alpha * grad[i] / std::sqrt(sums[i] + hp.eps);
}

}  // namespace nsqn
