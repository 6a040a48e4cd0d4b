"""Writes lima_parse.json, the structured-parse fixture used by tests and the CLI demo."""
import json

abstract = (
    "Large language models are trained in two stages: unsupervised pretraining on raw text, followed by "
    "large scale instruction tuning and reinforcement learning that align the model with end tasks and user "
    "preferences. We measure how much each stage matters by training LIMA, a 65B parameter LLaMa model "
    "fine-tuned with the standard supervised loss on only 1,000 carefully curated prompts and responses, "
    "without any reinforcement learning or human preference modeling. LIMA follows specific response formats "
    "from only a handful of training examples, including complex queries that range from planning trip "
    "itineraries to speculating about alternate history. It also generalizes to unseen tasks that did not "
    "appear in the training data. In a controlled human study, responses from LIMA are either equivalent or "
    "strictly preferred to GPT-4 in 43% of cases; the figure rises to 58% against Bard and 65% against "
    "DaVinci003, which was trained with human feedback. Taken together, the results suggest that almost all "
    "knowledge in large language models is learned during pretraining, and only limited instruction tuning "
    "data is necessary to teach models to produce high quality output."
)

sections = [
    ("Introduction",
     "Language models are pretrained to predict the next token at an enormous scale, which lets them learn "
     "general purpose representations that transfer to nearly any language understanding or generation task. "
     "To enable this transfer, several methods for aligning language models have been proposed, focusing mainly "
     "on instruction tuning over large multi-million example datasets and, more recently, reinforcement learning "
     "from human feedback collected over millions of interactions with human annotators. Existing alignment "
     "methods require significant amounts of compute and specialized data to reach ChatGPT level performance. "
     "We demonstrate that, given a strong pretrained language model, remarkably strong performance can be "
     "achieved by simply fine-tuning on 1,000 carefully curated training examples. "
     "We hypothesize that alignment can be a simple process where the model learns the style or format for "
     "interacting with users, to expose the knowledge and capabilities that were already acquired during "
     "pretraining. To test this hypothesis, we curate 1,000 examples that approximate real user prompts and "
     "high quality responses. We select 750 top questions and answers from community forums, such as Stack "
     "Exchange and wikiHow, sampling for quality and diversity. In addition, we manually write 250 examples of "
     "prompts and responses, while optimizing for task diversity and emphasizing a uniform response style in "
     "the spirit of an AI assistant. Finally, we train LIMA, a pretrained 65B parameter LLaMa model fine-tuned "
     "on this set of 1,000 demonstrations. "
     "We compare LIMA to state of the art language models and products across 300 challenging test prompts. "
     "In a human preference study, we find that LIMA outperforms the reinforcement learning based DaVinci003 "
     "from OpenAI, which was trained with human feedback, as well as a 65B parameter reproduction of Alpaca, "
     "which was trained on 52,000 examples. While humans typically prefer responses from GPT-4, Claude, and "
     "Bard over LIMA, this is not always the case; LIMA produces equal or preferable responses in 43%, 46%, "
     "and 58% of the cases, respectively. Repeating the human preference annotations with GPT-4 as the "
     "annotator corroborates our findings. Analyzing LIMA responses on an absolute scale reveals that 88% meet "
     "the prompt requirements, and 50% are considered excellent. "
     "Ablation experiments reveal vastly diminishing returns when scaling up data quantity without also "
     "scaling up prompt diversity, alongside major gains when optimizing data quality. In addition, despite "
     "having zero dialogue examples, we find that LIMA can conduct coherent multi-turn dialogue, and that this "
     "ability can be dramatically improved by adding only 30 hand crafted dialogue chains to the training set. "
     "Overall, these remarkable findings demonstrate the power of pretraining and its relative importance over "
     "large scale instruction tuning and reinforcement learning approaches."),
    ("Alignment Data",
     "We define the Superficial Alignment Hypothesis: a model's knowledge and capabilities are learnt almost "
     "entirely during pretraining, while alignment teaches it which subdistribution of formats should be used "
     "when interacting with users. If this hypothesis is correct, and alignment is largely about learning "
     "style, then a corollary is that one could sufficiently tune a pretrained language model with a rather "
     "small set of examples. To that end, we collect a dataset of 1,000 prompts and responses, where the "
     "outputs are stylistically aligned with each other, but the inputs are diverse. Specifically, we seek "
     "outputs in the style of a helpful AI assistant. We curate such examples from a variety of sources, "
     "primarily split into community question and answer forums and manually authored examples. We also "
     "collect a test set of 300 prompts and a development set of 50. "
     "Community questions and answers come from three websites: Stack Exchange, wikiHow, and the Pushshift "
     "Reddit Dataset. Answers from Stack Exchange and wikiHow are well aligned with the behavior of a helpful "
     "AI agent, and can therefore be mined automatically, whereas highly upvoted Reddit answers tend to be "
     "humorous or trolling, requiring a more manual approach to curate responses that follow the appropriate "
     "style. Stack Exchange contains 179 online communities, each one dedicated to a specific topic, with "
     "programming being the most popular. Users can post questions, answers, comments and upvote all of the "
     "above. Thanks to active community members and moderators, Stack Exchange has successfully maintained a "
     "high bar for content quality. We apply both quality and diversity controls when sampling from Stack "
     "Exchange, dividing the exchanges into 75 STEM exchanges and 99 other exchanges, and sampling 200 "
     "questions and answers from each set using a temperature of 3 to get a more uniform sample of domains. "
     "Within each exchange we take the questions with the highest score that are self contained in the title, "
     "and we keep the top answer when it has a strong positive score. "
     "wikiHow is an online wiki style publication featuring over 240,000 how-to articles on a variety of "
     "topics. Anyone can contribute, but articles are heavily moderated, resulting in almost universally high "
     "quality content. We sample 200 articles from wikiHow, sampling a category first and then an article "
     "within it to ensure diversity. We use the title as the prompt and the body of the article as the "
     "response. "
     "To further diversify the data beyond questions asked by users in online communities, we collect prompts "
     "from ourselves, the authors of this work. We designate two sets of authors, Group A and Group B, to "
     "create 250 prompts each, inspired by their own interests or those of their friends. We select 200 prompts "
     "from Group A for training and 50 prompts as a held-out development set. After filtering some problematic "
     "prompts, the remaining 230 prompts from Group B are used for test. We supplement the 200 training prompts "
     "with high quality answers that we write ourselves, in a uniform tone that acknowledges the question and "
     "then answers it. We also include 13 training prompts with some degree of toxicity or malevolence, with "
     "responses that partially or fully reject the command and explain why the assistant will not comply."),
    ("Training LIMA",
     "We train LIMA, short for Less Is More for Alignment, using the following protocol. Starting from LLaMa "
     "65B, we fine-tune on our 1,000 example alignment training set. To differentiate between each speaker, "
     "the user and the assistant, we introduce a special end of turn token at the end of each utterance; this "
     "token plays the same role as the end of sequence token in halting generation, but avoids conflation with "
     "any other meaning that the pretrained model may have imbued into the preexisting end of sequence token. "
     "We follow standard fine-tuning hyperparameters: we fine-tune for 15 epochs using AdamW with beta values "
     "of 0.9 and 0.95 and weight decay of 0.1. Without warmup steps, we set the initial learning rate to 1e-5 "
     "and linearly decay it to 1e-6 by the end of training. The batch size is set to 32 examples, or 64 for "
     "smaller models, and texts longer than 2048 tokens are trimmed. One notable deviation from the norm is "
     "the use of residual dropout; we apply dropout over residual connections, starting at 0.0 at the bottom "
     "layer and linearly raising the rate to 0.3 at the last layer, or 0.2 for smaller models. "
     "We find that perplexity does not correlate with generation quality, and thus manually select "
     "checkpoints between the 5th and the 10th epochs using the held-out development set of 50 examples. "
     "Because the training set is so small, a full training run takes only a few hours on a modest cluster, "
     "which makes it cheap to repeat the procedure for the ablation experiments. We keep every training "
     "hyperparameter fixed across those ablations so that differences in quality can be attributed to the "
     "data alone rather than to changes in optimization. "
     "The same protocol is applied when training on the alternative datasets used in the ablations, such as "
     "the filtered and unfiltered Stack Exchange samples and the larger datasets of automatically mined "
     "examples. For dialogue experiments we extend the training data with multi-turn chains, treating every "
     "assistant turn as a target and every user turn as context, while the special end of turn token "
     "separates the speakers within each chain. Generation at test time uses nucleus sampling with a "
     "probability threshold of 0.9 and a temperature of 0.7, together with a repetition penalty applied to "
     "previously generated tokens and a maximum generation length of 2048 tokens, for every model that we "
     "train ourselves."),
    ("Human Evaluation",
     "We evaluate LIMA by comparing it to state of the art language models, and find that it outperforms "
     "OpenAI's RLHF based DaVinci003 and a 65B parameter reproduction of Alpaca trained on 52,000 examples, "
     "and often produces better or equal responses than GPT-4. An analysis of LIMA generations finds that 50% "
     "of its outputs are considered excellent. The fact that simple fine-tuning over so few examples is enough "
     "to compete with the state of the art strongly supports the Superficial Alignment Hypothesis, as it "
     "demonstrates the power of pretraining and its relative importance over large scale instruction tuning "
     "and reinforcement learning approaches. "
     "To compare LIMA to other models, we generate a single response for each test prompt. We then ask crowd "
     "workers to compare LIMA outputs to each of the baselines and label which one they prefer. We repeat this "
     "experiment, replacing human crowd workers with GPT-4, finding similar agreement levels. We compare LIMA "
     "to five baselines: Alpaca 65B, in which we fine-tune LLaMa 65B on the 52,000 examples in the Alpaca "
     "training set; OpenAI's DaVinci003, a large language model tuned with reinforcement learning from human "
     "feedback; Google's Bard, based on PaLM; Anthropic's Claude, a 52B parameter model trained with "
     "reinforcement learning from AI feedback; and OpenAI's GPT-4, a large language model trained with "
     "reinforcement learning from human feedback, which is currently considered the state of the art. "
     "Responses from all baselines were sampled throughout April 2023. "
     "At each step of the human study, we present annotators with a single prompt and two possible responses, "
     "generated by different models. The annotators are asked to label which response was better, or whether "
     "neither response was significantly better than the other. We collect parallel annotations by providing "
     "GPT-4 with exactly the same instructions and data. Human preference results show that, despite training "
     "on 52 times more data, Alpaca 65B tends to produce less preferable outputs than LIMA. The same is true "
     "for DaVinci003, though to a lesser extent; what is striking about this result is the fact that "
     "DaVinci003 was trained with RLHF, a supposedly superior alignment method. Bard shows the opposite trend "
     "to DaVinci003, producing better responses than LIMA 42% of the time; however, this also means that 58% "
     "of the time the LIMA response was at least as good as Bard. Finally, we see that while Claude and GPT-4 "
     "generally perform better than LIMA, there is a non-trivial amount of cases where LIMA does actually "
     "produce better responses. Perhaps ironically, even GPT-4 prefers LIMA outputs over its own 19% of the "
     "time."),
    ("Why Less More for Alignment",
     "We investigate the effects of training data diversity, quality, and quantity through ablation "
     "experiments. We observe that, for the purpose of alignment, scaling up input diversity and output "
     "quality have measurable positive effects, while scaling up quantity alone might not. For these "
     "experiments we fine-tune a 7B parameter LLaMa model on various datasets, controlling for the same "
     "hyperparameters. We then sample 5 responses for each test set prompt and evaluate response quality by "
     "asking ChatGPT to grade the helpfulness of a response on a 1 to 6 Likert scale. "
     "To test the effects of prompt diversity while controlling for quality and quantity, we compare the "
     "effect of training on quality filtered Stack Exchange data, which has heterogeneous prompts with "
     "excellent responses, and wikiHow data, which has homogeneous prompts with excellent responses. While we "
     "compare Stack Exchange with wikiHow as a proxy for diversity, we acknowledge that there may be other "
     "conflating factors when sampling data from two different sources. We sample 2,000 training examples "
     "from each source. The more diverse Stack Exchange data yields significantly higher performance. "
     "To test the effects of response quality, we sample 2,000 examples from Stack Exchange without any "
     "quality or stylistic filters, and compare a model trained on this dataset to the one trained on our "
     "filtered dataset. There is a significant 0.5 point difference between models trained on the filtered "
     "and unfiltered data sources. "
     "The practice of scaling up the number of examples is a well known strategy for improving performance "
     "in many machine learning settings. To test its effect on our setting, we sample exponentially "
     "increasing training sets from Stack Exchange. Surprisingly, doubling the training set does not improve "
     "response quality. This result, alongside our other findings in this section, suggests that the "
     "scaling laws of alignment are not necessarily subject to quantity alone, but rather a function of "
     "prompt diversity while maintaining high quality responses. "
     "The explanation for the phenomenon is that the pretrained model already contains the knowledge and "
     "abilities needed to answer the prompts, so alignment only needs to select the right output format and "
     "tone. A small set of diverse, high quality demonstrations is enough to show the model that format, "
     "while many additional examples of the same kind add little new information. Poorly written examples, "
     "on the other hand, teach the wrong style, which is why output quality matters so much. "
     "Can a model fine-tuned on only 1,000 single turn interactions engage in multi-turn dialogue? We test "
     "LIMA across 10 live conversations, labeling each response as Fail, Pass, or Excellent. LIMA responses "
     "are surprisingly coherent for a zero-shot chatbot, referencing information from previous steps in the "
     "dialogue, but it fails to follow the prompt within 3 out of 10 conversations. To improve its ability "
     "to converse, we gather 30 multi-turn dialogue chains and fine-tune a new version of LIMA on the "
     "combined 1,030 examples, which makes generation of excellent responses far more common and reduces the "
     "failure rate to 1 in 42 turns."),
    ("Discussion",
     "We show that fine-tuning a strong pretrained language model on 1,000 carefully curated examples can "
     "produce remarkable, competitive results on a wide range of prompts. However, there are limitations to "
     "this approach. Primarily, the mental effort in constructing such examples is significant and difficult "
     "to scale up. Secondly, LIMA is not as robust as product grade models; while LIMA typically generates "
     "good responses, an unlucky sample during decoding or an adversarial prompt can often lead to a weak "
     "response. That said, the evidence presented in this work demonstrates the potential of tackling the "
     "complex issues of alignment with a simple approach. "
     "The absolute analysis of the 50 development prompts points in the same direction as the pairwise "
     "comparisons. Of LIMA's responses, 50% are rated excellent, and only 12% fail to meet the prompt "
     "requirements, with no noticeable trend within the failure cases. When tested on 13 out of distribution "
     "prompts, LIMA reaches similar numbers, with 20% of responses failing, 35% passing, and 45% excellent. "
     "Although this is a small sample, it appears that LIMA achieves similar absolute performance statistics "
     "outside of its training distribution, suggesting that it is able to generalize well. "
     "LIMA also handles safety sensitive prompts reasonably well. Although the training set contains only 13 "
     "examples in which the response rejects the request, LIMA responds safely to 80% of the sensitive test "
     "prompts, including 6 out of 10 prompts with malicious intent. In some cases, however, LIMA carries out "
     "a task when the malicious intent is only implied rather than stated, a weakness shared with other "
     "lightly aligned models. "
     "Finally, the findings suggest directions for further work. Because knowledge comes almost entirely "
     "from pretraining, better base models should translate directly into better aligned assistants with the "
     "same small alignment set, and research effort may be better spent on the diversity and quality of the "
     "demonstrations than on collecting ever larger volumes of instruction data. Understanding exactly which "
     "properties of an example make it valuable for alignment, and how to find such examples automatically, "
     "remains an open question that we leave for future study. We also note that our evaluation relies on a "
     "fixed set of 300 test prompts, and that a broader set of users and tasks could reveal additional "
     "strengths or weaknesses of the approach, in particular on long form reasoning and on tasks that "
     "require up to date factual knowledge."),
]

references = [
    ("Training a helpful and harmless assistant with reinforcement learning from human feedback",
     "Yuntao Bai, Andy Jones, Kamal Ndousse", "2022", "arXiv preprint"),
    ("Scaling language modeling with pathways", "Aakanksha Chowdhery, Sharan Narang, Jacob Devlin", "2022",
     "arXiv preprint"),
    ("Scaling instruction-finetuned language models", "Hyung Won Chung, Le Hou, Shayne Longpre", "2022",
     "arXiv preprint"),
    ("LLaMA: Open and efficient foundation language models", "Hugo Touvron, Thibaut Lavril, Gautier Izacard",
     "2023", "arXiv preprint"),
    ("Stanford Alpaca: An instruction-following LLaMA model", "Rohan Taori, Ishaan Gulrajani, Tianyi Zhang",
     "2023", "GitHub repository"),
    ("Training language models to follow instructions with human feedback", "Long Ouyang, Jeff Wu, Xu Jiang",
     "2022", "Advances in Neural Information Processing Systems"),
    ("Constitutional AI: Harmlessness from AI feedback", "Yuntao Bai, Saurav Kadavath, Sandipan Kundu", "2022",
     "arXiv preprint"),
    ("Decoupled weight decay regularization", "Ilya Loshchilov, Frank Hutter", "2017",
     "International Conference on Learning Representations"),
    ("Self-instruct: Aligning language model with self generated instructions", "Yizhong Wang, Yeganeh Kordi",
     "2022", "arXiv preprint"),
    ("The curious case of neural text degeneration", "Ari Holtzman, Jan Buys, Li Du", "2019",
     "International Conference on Learning Representations"),
]

figures = [
    {"figure_label": "1", "figure_type": "figure", "figure_id": "fig_0",
     "figure_caption": "Human preference evaluation, comparing LIMA to 5 different baselines across 300 test prompts.",
     "figure_data": ""},
    {"figure_label": "2", "figure_type": "figure", "figure_id": "fig_1",
     "figure_caption": "Preference evaluation using GPT-4 as the annotator, given the same instructions provided to humans.",
     "figure_data": ""},
    {"figure_label": "1", "figure_type": "table", "figure_id": "tab_0",
     "figure_caption": "Sources of training prompts and responses, and the test prompts.",
     "figure_data": "Stack Exchange (STEM) 200 | Stack Exchange (Other) 200 | wikiHow 200 | Pushshift r/WritingPrompts 150 | Natural Instructions 50 | Paper Authors (Group A) 200"},
]

doc = {
    "title": "LIMA: Less Is More for Alignment",
    "abstract": abstract,
    "sections": [{"heading": h, "text": t} for h, t in sections],
    "references": [{"title": t, "author": a, "year": y, "journal": j} for t, a, y, j in references],
    "figures": figures,
    "doi": "",
}

with open("lima_parse.json", "w", encoding="utf-8") as f:
    json.dump(doc, f, indent=2, ensure_ascii=False)
    f.write("\n")
