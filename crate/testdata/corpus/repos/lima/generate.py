# Local generation with Transformers. Planted: two loads without a pinned
# revision (NMVP x2); token caps and temperatures are set.

from transformers import AutoModelForCausalLM, AutoTokenizer, pipeline

tokenizer = AutoTokenizer.from_pretrained("mistralai/Mistral-7B-v0.1")
model = AutoModelForCausalLM.from_pretrained("mistralai/Mistral-7B-v0.1")


def complete(prompt):
    inputs = tokenizer(prompt, return_tensors="pt")
    output = model.generate(inputs.input_ids, max_new_tokens=64, temperature=0.7)
    return tokenizer.decode(output[0])


summarizer = pipeline("summarization", model="t5-small", max_length=60, temperature=1.0)
