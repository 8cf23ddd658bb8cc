#include "voz/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "voz/error.hpp"

namespace voz {

namespace {

constexpr const char* kFormatTag = "voz-model";
constexpr int kFormatVersion = 1;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_vector(std::ostream& out, const char* key, const std::vector<double>& v) {
    out << key << ' ' << v.size();
    for (double x : v) out << ' ' << fmt(x);
    out << '\n';
}

class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) { in_.imbue(std::locale::classic()); }

    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw Error("model file: unexpected end of file");
        return w;
    }

    void expect(const std::string& key) {
        const std::string w = word();
        if (w != key) throw Error("model file: expected '" + key + "', found '" + w + "'");
    }

    double number() {
        double v = 0.0;
        if (!(in_ >> v)) throw Error("model file: expected a number");
        return v;
    }

    long integer() {
        long v = 0;
        if (!(in_ >> v)) throw Error("model file: expected an integer");
        return v;
    }

    std::vector<double> vector(const std::string& key) {
        expect(key);
        const long n = integer();
        if (n < 0) throw Error("model file: negative vector length");
        std::vector<double> v(static_cast<size_t>(n), 0.0);
        for (auto& x : v) x = number();
        return v;
    }

private:
    std::istream& in_;
};

}  // namespace

void save_model_set(const ModelSet& models, const std::filesystem::path& path) {
    std::ostringstream out;
    out.imbue(std::locale::classic());

    const ModelMeta& meta = models.meta;
    out << kFormatTag << ' ' << kFormatVersion << '\n';
    out << "sample_rate " << meta.analysis.sample_rate << '\n';
    out << "frame_length " << fmt(meta.analysis.frame_length_s) << '\n';
    out << "frame_shift " << fmt(meta.analysis.frame_shift_s) << '\n';
    out << "order " << meta.analysis.order << '\n';
    out << "alpha " << fmt(meta.analysis.alpha) << '\n';
    out << "f0_min " << fmt(meta.analysis.f0_min) << '\n';
    out << "f0_max " << fmt(meta.analysis.f0_max) << '\n';
    out << "states " << meta.n_states << '\n';
    write_vector(out, "spectral_floor", meta.spectral_floor);
    out << "lf0_floor " << fmt(meta.lf0_floor) << '\n';
    out << "phonemes " << models.models.size() << '\n';

    for (const auto& [symbol, hmm] : models.models) {  // std::map: sorted, deterministic
        out << "phoneme " << symbol << ' ' << hmm.n_states() << '\n';
        const auto dur = models.durations.find(symbol);
        if (dur == models.durations.end())
            throw Error("model set missing duration model for '" + symbol + "'");
        write_vector(out, "duration_mean", dur->second.mean);
        write_vector(out, "duration_var", dur->second.var);
        for (int s = 0; s < hmm.n_states(); ++s) {
            const StateEmission& e = hmm.emissions[size_t(s)];
            out << "state " << s << '\n';
            out << "loop " << fmt(hmm.self_loop[size_t(s)]) << '\n';
            write_vector(out, "spectral_mean", e.spectral.mean);
            write_vector(out, "spectral_var", e.spectral.var);
            out << "msd_weight " << fmt(e.pitch.voiced_weight) << '\n';
            write_vector(out, "lf0_mean", e.pitch.voiced_gauss.mean);
            write_vector(out, "lf0_var", e.pitch.voiced_gauss.var);
        }
    }
    out << "end\n";

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + path.string());
    const std::string s = out.str();
    f.write(s.data(), std::streamsize(s.size()));
    if (!f) throw Error("write failed: " + path.string());
}

ModelSet load_model_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path.string());
    TokenReader r(in);

    r.expect(kFormatTag);
    if (r.integer() != kFormatVersion) throw Error("unsupported model file version");

    ModelSet m;
    r.expect("sample_rate");
    m.meta.analysis.sample_rate = uint32_t(r.integer());
    r.expect("frame_length");
    m.meta.analysis.frame_length_s = r.number();
    r.expect("frame_shift");
    m.meta.analysis.frame_shift_s = r.number();
    r.expect("order");
    m.meta.analysis.order = int(r.integer());
    r.expect("alpha");
    m.meta.analysis.alpha = r.number();
    r.expect("f0_min");
    m.meta.analysis.f0_min = r.number();
    r.expect("f0_max");
    m.meta.analysis.f0_max = r.number();
    r.expect("states");
    m.meta.n_states = int(r.integer());
    m.meta.spectral_floor = r.vector("spectral_floor");
    r.expect("lf0_floor");
    m.meta.lf0_floor = r.number();

    r.expect("phonemes");
    const long n_phonemes = r.integer();

    for (long p = 0; p < n_phonemes; ++p) {
        r.expect("phoneme");
        const std::string symbol = r.word();
        if (!is_inventory_symbol(symbol))
            throw Error("model file: unknown phoneme '" + symbol + "'");
        const long n_states = r.integer();

        DurationModel dur;
        dur.mean = r.vector("duration_mean");
        dur.var = r.vector("duration_var");
        if (long(dur.mean.size()) != n_states || long(dur.var.size()) != n_states)
            throw Error("model file: duration size mismatch for '" + symbol + "'");

        LeftRightHMM hmm;
        hmm.self_loop.resize(size_t(n_states));
        hmm.emissions.resize(size_t(n_states));
        for (long s = 0; s < n_states; ++s) {
            r.expect("state");
            if (r.integer() != s) throw Error("model file: state index out of order");
            r.expect("loop");
            hmm.self_loop[size_t(s)] = r.number();
            StateEmission& e = hmm.emissions[size_t(s)];
            e.spectral.mean = r.vector("spectral_mean");
            e.spectral.var = r.vector("spectral_var");
            r.expect("msd_weight");
            e.pitch.voiced_weight = r.number();
            e.pitch.voiced_gauss.mean = r.vector("lf0_mean");
            e.pitch.voiced_gauss.var = r.vector("lf0_var");
            if (e.spectral.mean.size() != m.spectral_dim() ||
                e.spectral.var.size() != m.spectral_dim())
                throw Error("model file: spectral dimension mismatch for '" + symbol + "'");
        }
        m.models.emplace(symbol, std::move(hmm));
        m.durations.emplace(symbol, std::move(dur));
    }
    r.expect("end");
    return m;
}

}  // namespace voz
