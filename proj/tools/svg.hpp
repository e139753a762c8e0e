#ifndef FMM_TOOLS_SVG_HPP
#define FMM_TOOLS_SVG_HPP

#include <string>
#include <vector>

namespace fmmtool {

struct Curve {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
};

// Static scatter-plus-line chart: data as dots, the fit as one polyline,
// optional centered component curves with a legend. Output depends only on
// the inputs, so identical calls give identical bytes.
std::string render_plot_svg(const std::vector<double>& data_t,
                            const std::vector<double>& data_y,
                            const Curve& fit,
                            const std::vector<Curve>& components);

}  // namespace fmmtool

#endif
