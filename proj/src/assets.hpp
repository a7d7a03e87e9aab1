#pragma once

// Text assets compiled in from assets/ at configure time.
namespace memograph::assets {

extern const char kPerceptorPrompt[];
extern const char kSceneGraphSchema[];
extern const char kEvaluatorSchema[];
extern const char kPlannerSchema[];
extern const char kDefaultSkills[];
extern const char kTaskFamilies[];
extern const char kPerturbationTables[];

}  // namespace memograph::assets
