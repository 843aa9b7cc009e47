#include "nmpinv/invlearn/selection.hpp"

#include <algorithm>
#include <stdexcept>

namespace nmpinv::invlearn {

std::string to_string(SelectionKind k)
{
    switch (k) {
        case SelectionKind::ExactInverse: return "exact_inverse";
        case SelectionKind::ApproxInverse: return "approx_inverse";
        case SelectionKind::Naive: return "naive";
        case SelectionKind::AugmentedPast: return "augmented_past";
    }
    return "?";
}

std::string to_string(Encoding e) { return e == Encoding::Absolute ? "absolute" : "relative"; }

InputSelection InputSelection::exact_inverse(int n, int r)
{
    InputSelection s;
    s.kind = SelectionKind::ExactInverse;
    s.n    = n;
    s.r    = r;
    return s;
}

InputSelection InputSelection::approx_inverse(int n)
{
    InputSelection s;
    s.kind = SelectionKind::ApproxInverse;
    s.n    = n;
    return s;
}

InputSelection InputSelection::naive(int r)
{
    InputSelection s;
    s.kind = SelectionKind::Naive;
    s.r    = r;
    return s;
}

InputSelection InputSelection::augmented_past(int n, int past)
{
    InputSelection s;
    s.kind = SelectionKind::AugmentedPast;
    s.n    = n;
    s.past = past;
    return s;
}

void InputSelection::validate() const
{
    switch (kind) {
        case SelectionKind::ExactInverse:
            if (n < 1 || r < 0 || r > n) throw std::invalid_argument("exact inverse selection needs n >= 1 and 0 <= r <= n");
            break;
        case SelectionKind::ApproxInverse:
            if (n < 0) throw std::invalid_argument("approximate inverse selection needs n >= 0");
            break;
        case SelectionKind::Naive:
            if (r < 0) throw std::invalid_argument("naive selection needs r >= 0");
            break;
        case SelectionKind::AugmentedPast:
            if (n < 0 || past < 1) throw std::invalid_argument("augmented selection needs n >= 0 and past >= 1");
            break;
    }
    if (velocity_channel && n < 1) throw std::invalid_argument("velocity channel needs n >= 1");
    if (feature_count() < 1) throw std::invalid_argument("selection produces no features");
}

std::vector<int> InputSelection::output_offsets() const
{
    std::vector<int> o;
    switch (kind) {
        case SelectionKind::ExactInverse:
            for (int i = -n + r; i <= r; ++i) o.push_back(i);
            break;
        case SelectionKind::ApproxInverse:
        case SelectionKind::AugmentedPast:
            for (int i = 0; i <= n; ++i) o.push_back(i);
            break;
        case SelectionKind::Naive: o.push_back(r); break;
    }
    if (encoding == Encoding::Relative) o.erase(std::remove(o.begin(), o.end(), 0), o.end());
    return o;
}

std::vector<int> InputSelection::reference_offsets() const
{
    std::vector<int> o;
    if (kind == SelectionKind::ExactInverse)
        for (int i = -n + r; i <= -1; ++i) o.push_back(i);
    if (kind == SelectionKind::AugmentedPast)
        for (int i = 1; i <= past; ++i) o.push_back(-i);
    return o;
}

std::vector<int> InputSelection::velocity_offsets() const
{
    std::vector<int> o;
    if (!velocity_channel) return o;
    for (int i = encoding == Encoding::Relative ? 1 : 0; i < n; ++i) o.push_back(i);
    return o;
}

int InputSelection::window_begin() const
{
    switch (kind) {
        case SelectionKind::ExactInverse: return -n + r;
        case SelectionKind::Naive: return encoding == Encoding::Relative ? std::min(0, r) : r;
        default: return 0;
    }
}

int InputSelection::window_end() const
{
    switch (kind) {
        case SelectionKind::ExactInverse: return r;
        case SelectionKind::Naive: return encoding == Encoding::Relative ? std::max(0, r) : r;
        default: return n;
    }
}

int InputSelection::lookback() const
{
    int lb = std::max(0, -window_begin());
    for (int o : reference_offsets()) lb = std::max(lb, -o);
    return lb;
}

int InputSelection::lookahead() const
{
    int la = std::max(0, window_end());
    for (int o : velocity_offsets()) la = std::max(la, o);
    return la;
}

int InputSelection::feature_count() const
{
    return static_cast<int>(output_offsets().size() + reference_offsets().size() + velocity_offsets().size());
}

namespace {
std::string idx(const char* sym, int o)
{
    if (o == 0) return std::string(sym) + "(k)";
    return std::string(sym) + "(k" + (o > 0 ? "+" : "") + std::to_string(o) + ")";
}
}  // namespace

std::vector<std::string> InputSelection::feature_names() const
{
    const bool rel = encoding == Encoding::Relative;
    std::vector<std::string> names;
    for (int o : output_offsets()) names.push_back(idx("y", o) + (rel ? "-y(k)" : ""));
    for (int o : reference_offsets()) names.push_back(idx("u", o) + (rel ? "-y(k)" : ""));
    for (int o : velocity_offsets()) names.push_back(idx("v", o) + (rel ? "-v(k)" : ""));
    return names;
}

std::vector<std::string> InputSelection::label_names() const
{
    const bool rel = encoding == Encoding::Relative;
    std::vector<std::string> names{rel ? "u(k)-y(k)" : "u(k)"};
    if (velocity_channel) names.push_back(rel ? "u_vel(k)-v(k)" : "u_vel(k)");
    return names;
}

Eigen::VectorXd InputSelection::labels(double u_pos, double u_vel, double y, double v) const
{
    const bool rel = encoding == Encoding::Relative;
    Eigen::VectorXd l(label_count());
    l[0] = u_pos - (rel ? y : 0.0);
    if (velocity_channel) l[1] = u_vel - (rel ? v : 0.0);
    return l;
}

double InputSelection::reference_position(const Eigen::VectorXd& out, double yd) const
{
    return out[0] + (encoding == Encoding::Relative ? yd : 0.0);
}

double InputSelection::reference_velocity(const Eigen::VectorXd& out, double vd) const
{
    if (!velocity_channel) throw std::logic_error("selection has no velocity channel");
    return out[1] + (encoding == Encoding::Relative ? vd : 0.0);
}

nlohmann::json to_json(const InputSelection& s)
{
    nlohmann::json j{{"kind", to_string(s.kind)}, {"encoding", to_string(s.encoding)}, {"velocity_channel", s.velocity_channel}};
    switch (s.kind) {
        case SelectionKind::ExactInverse: j["n"] = s.n; j["r"] = s.r; break;
        case SelectionKind::ApproxInverse: j["n"] = s.n; break;
        case SelectionKind::Naive: j["r"] = s.r; break;
        case SelectionKind::AugmentedPast: j["n"] = s.n; j["past"] = s.past; break;
    }
    return j;
}

InputSelection selection_from_json(const nlohmann::json& j)
{
    InputSelection s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exact_inverse")
        s = InputSelection::exact_inverse(j.at("n").get<int>(), j.at("r").get<int>());
    else if (kind == "approx_inverse")
        s = InputSelection::approx_inverse(j.at("n").get<int>());
    else if (kind == "naive")
        s = InputSelection::naive(j.at("r").get<int>());
    else if (kind == "augmented_past")
        s = InputSelection::augmented_past(j.at("n").get<int>(), j.value("past", 1));
    else
        throw std::invalid_argument("unknown selection kind '" + kind + "'");
    const std::string enc = j.value("encoding", "absolute");
    if (enc == "relative")
        s.encoding = Encoding::Relative;
    else if (enc != "absolute")
        throw std::invalid_argument("unknown encoding '" + enc + "'");
    s.velocity_channel = j.value("velocity_channel", false);
    s.validate();
    return s;
}

}  // namespace nmpinv::invlearn
