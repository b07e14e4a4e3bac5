// SPDX-License-Identifier: Apache-2.0

#include "keyrate/preprocess.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "keyrate/errors.hpp"

namespace keyrate {

TimeSeries downsample(const TimeSeries& s, std::size_t factor) {
    if (factor == 0) throw DomainError("downsample: factor must be >= 1");
    TimeSeries out;
    out.sampling_interval = s.sampling_interval * static_cast<double>(factor);
    out.values.reserve(s.size() / factor + 1);
    for (std::size_t i = 0; i < s.size(); i += factor) out.values.push_back(s.values[i]);
    return out;
}

std::vector<double> autocorrelation(const TimeSeries& s, std::size_t max_lag) {
    const std::size_t n = s.size();
    if (max_lag >= n)
        throw DomainError("autocorrelation: max_lag " + std::to_string(max_lag) +
                          " must be below the series length " + std::to_string(n));
    std::vector<double> r(max_lag + 1, 0.0);
    for (std::size_t l = 0; l <= max_lag; ++l) {
        double sum = 0.0;
        for (std::size_t i = 0; i + l < n; ++i) sum += s.values[i] * s.values[i + l];
        r[l] = sum / static_cast<double>(n - l);
    }
    return r;
}

TimeSeries mean_center(const TimeSeries& s) {
    if (s.empty()) throw DomainError("mean_center: series is empty");
    double sum = 0.0;
    for (double v : s.values) sum += v;
    const double mean = sum / static_cast<double>(s.size());
    TimeSeries out;
    out.sampling_interval = s.sampling_interval;
    out.values.reserve(s.size());
    for (double v : s.values) out.values.push_back(v - mean);
    return out;
}

PredictorModel levinson_durbin(const std::vector<double>& r, const WarningHandler& warn) {
    if (r.size() < 2) throw DomainError("levinson_durbin: need r[0..p] with p >= 1");
    if (!(r[0] > 0.0)) throw DomainError("levinson_durbin: r[0] must be > 0");

    const std::size_t p = r.size() - 1;
    std::vector<double> a;  // a[i-1] holds a_i of the current order
    a.reserve(p);
    double error = r[0];

    for (std::size_t m = 1; m <= p; ++m) {
        double acc = r[m];
        for (std::size_t i = 1; i < m; ++i) acc -= a[i - 1] * r[m - i];
        double kappa = acc / error;
        if (std::fabs(kappa) >= 1.0) {
            if (std::fabs(kappa) <= 1.0 + 1e-12) {
                const double clamped = (kappa > 0 ? 1.0 : -1.0) * (1.0 - 1e-12);
                if (warn)
                    warn("levinson_durbin: reflection coefficient " + std::to_string(kappa) +
                         " at stage " + std::to_string(m) + " clamped to the stability boundary");
                kappa = clamped;
            } else {
                throw IllConditionedError(
                    "levinson_durbin: autocorrelation sequence is not positive semidefinite "
                    "(reflection coefficient " +
                    std::to_string(kappa) + " at stage " + std::to_string(m) + ")");
            }
        }
        // Order update: a_i <- a_i - kappa * a_{m-i}, then append a_m = kappa.
        std::vector<double> next(a);
        for (std::size_t i = 1; i < m; ++i) next[i - 1] = a[i - 1] - kappa * a[m - i - 1];
        next.push_back(kappa);
        a = std::move(next);
        error *= (1.0 - kappa * kappa);
    }

    if (error < 0.0) {
        if (error >= -1e-12)
            error = 0.0;
        else
            throw IllConditionedError("levinson_durbin: negative residual variance " +
                                      std::to_string(error));
    }

    PredictorModel model;
    model.order = p;
    model.coefficients = std::move(a);
    model.residual_variance = error;
    model.source_autocorrelation = r;
    return model;
}

TimeSeries predict(const TimeSeries& s, const PredictorModel& model) {
    const std::size_t p = model.order;
    if (model.coefficients.size() != p)
        throw DomainError("predict: model coefficient count does not match its order");
    if (s.size() <= p)
        throw DomainError("predict: series of length " + std::to_string(s.size()) +
                          " is too short for predictor order " + std::to_string(p));
    TimeSeries out;
    out.sampling_interval = s.sampling_interval;
    out.values.resize(s.size() - p);
    for (std::size_t k = p; k < s.size(); ++k) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= p; ++i) acc += model.coefficients[i - 1] * s.values[k - i];
        out.values[k - p] = acc;
    }
    return out;
}

std::pair<TimeSeries, PredictorModel> decorrelate(const TimeSeries& s, std::size_t order,
                                                  const WarningHandler& warn) {
    if (order == 0) throw DomainError("decorrelate: order must be >= 1");
    if (s.size() <= 2 * order)
        throw DomainError("decorrelate: series of length " + std::to_string(s.size()) +
                          " is too short for order " + std::to_string(order) +
                          " (need more than twice the order)");
    const TimeSeries centered = mean_center(s);
    const std::vector<double> r = autocorrelation(centered, order);
    PredictorModel model = levinson_durbin(r, warn);
    const TimeSeries predicted = predict(centered, model);
    TimeSeries innovation;
    innovation.sampling_interval = s.sampling_interval;
    innovation.values.resize(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i)
        innovation.values[i] = centered.values[i + order] - predicted.values[i];
    return {std::move(innovation), std::move(model)};
}

namespace {

std::string join_full_precision(const std::vector<double>& values) {
    std::string out;
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        if (i) out += ", ";
        out += buf;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* field) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        std::size_t b = start, e = comma;
        while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
        while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
        if (b < e) {
            double v = 0.0;
            const auto res = std::from_chars(text.data() + b, text.data() + e, v);
            if (res.ec != std::errc{} || res.ptr != text.data() + e)
                throw ParseError(std::string("predictor_from_text: non-numeric entry in ") + field);
            out.push_back(v);
        }
        if (comma == text.size()) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string predictor_to_text(const PredictorModel& model) {
    std::ostringstream out;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", model.residual_variance);
    out << "order = " << model.order << '\n'
        << "residual_variance = " << buf << '\n'
        << "coefficients = " << join_full_precision(model.coefficients) << '\n'
        << "autocorrelation = " << join_full_precision(model.source_autocorrelation) << '\n';
    return out.str();
}

PredictorModel predictor_from_text(const std::string& text) {
    PredictorModel model;
    bool have_order = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto strip = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
        };
        strip(key);
        strip(value);
        if (key == "order") {
            model.order = static_cast<std::size_t>(std::stoull(value));
            have_order = true;
        } else if (key == "residual_variance") {
            double v = 0.0;
            const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
            if (res.ec != std::errc{})
                throw ParseError("predictor_from_text: bad residual_variance");
            model.residual_variance = v;
        } else if (key == "coefficients") {
            model.coefficients = parse_double_list(value, "coefficients");
        } else if (key == "autocorrelation") {
            model.source_autocorrelation = parse_double_list(value, "autocorrelation");
        }
    }
    if (!have_order || model.coefficients.size() != model.order)
        throw ParseError("predictor_from_text: missing or inconsistent fields");
    return model;
}

namespace {

TimeSeries apply_method(const TimeSeries& s, ProcessingMethod method, std::size_t n,
                        const WarningHandler& warn, PredictorModel* model_out) {
    if (method == ProcessingMethod::downsample) return downsample(s, n);
    auto [innovation, model] = decorrelate(s, n, warn);
    if (model_out) *model_out = std::move(model);
    return std::move(innovation);
}

}  // namespace

TraceSet process_traceset(const TraceSet& trace, ProcessingMethod method,
                          std::size_t order_or_factor, const WarningHandler& warn) {
    if (trace.variant != Variant::original)
        throw DomainError(std::string("process_traceset: input variant must be original, got ") +
                          variant_name(trace.variant));

    TraceSet out;
    out.eve_distance = trace.eve_distance;
    out.ab_distance = trace.ab_distance;
    out.wavelength = trace.wavelength;
    out.provenance = trace.provenance;

    PredictorModel mx, my, mz, mz2;
    out.x = apply_method(trace.x, method, order_or_factor, warn, &mx);
    out.y = apply_method(trace.y, method, order_or_factor, warn, &my);
    out.z = apply_method(trace.z, method, order_or_factor, warn, &mz);
    if (trace.z_secondary)
        out.z_secondary = apply_method(*trace.z_secondary, method, order_or_factor, warn, &mz2);

    if (method == ProcessingMethod::downsample) {
        out.variant = Variant::downsampled;
    } else {
        out.variant = Variant::decorrelated;
        std::ostringstream note;
        note << trace.provenance << "\n[predictor x]\n"
             << predictor_to_text(mx) << "[predictor y]\n"
             << predictor_to_text(my) << "[predictor z]\n"
             << predictor_to_text(mz);
        if (trace.z_secondary) note << "[predictor z2]\n" << predictor_to_text(mz2);
        out.provenance = note.str();
    }
    return out;
}

}  // namespace keyrate
