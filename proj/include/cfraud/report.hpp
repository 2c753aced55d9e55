// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfraud/harness.hpp"

namespace cfraud {

inline constexpr std::string_view kVersion = "1.0.0";

struct SummaryRow {
  std::string classifier;
  std::string modality;
  std::string label_setup;
  MetricsDistribution distribution;
};

/// One row per metric: classifier,modality,label_setup,metric,mean,std,iterations
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// iteration,accuracy,precision,recall,f1,auc,tp,fp,tn,fn
void write_samples_csv(std::ostream& out, const MetricsDistribution& dist);
MetricsDistribution read_samples_csv(std::istream& in);

/// group,mean_auc,std_auc,delta_auc,mean_accuracy,mean_f1
void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows);

/// Reproducibility record: configuration, seed, version and input digests.
/// Contains no timestamps, so identical runs produce identical manifests.
nlohmann::json run_manifest(const ExperimentConfig& cfg, const std::map<std::string, std::string>& input_digests,
                            const std::map<std::string, std::string>& outputs = {});

}  // namespace cfraud
